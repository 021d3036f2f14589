#pragma once

#include <gevrey/borel.hpp>
#include <gevrey/calculus.hpp>
#include <gevrey/commands.hpp>
#include <gevrey/counterexample.hpp>
#include <gevrey/error.hpp>
#include <gevrey/evolution.hpp>
#include <gevrey/gevrey_classes.hpp>
#include <gevrey/json_io.hpp>
#include <gevrey/logmath.hpp>
#include <gevrey/region.hpp>
#include <gevrey/report.hpp>
#include <gevrey/series.hpp>
#include <gevrey/spectrum.hpp>
#include <gevrey/state.hpp>
#include <gevrey/verify.hpp>
