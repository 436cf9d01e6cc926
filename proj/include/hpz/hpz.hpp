#ifndef HPZ_HPZ_HPP_
#define HPZ_HPZ_HPP_

/// Umbrella header for the set library. io.hpp, oracle.hpp and verification.hpp
/// are included separately since they pull in JSON and test tooling.

#include "error.hpp"
#include "feasibility.hpp"
#include "interval.hpp"
#include "leaf.hpp"
#include "nonlinear.hpp"
#include "ops.hpp"
#include "reach.hpp"
#include "sample.hpp"
#include "set.hpp"

#endif
