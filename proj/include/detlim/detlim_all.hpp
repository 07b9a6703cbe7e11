#pragma once

#include "detlim/bounds.hpp"
#include "detlim/common.hpp"
#include "detlim/divergence.hpp"
#include "detlim/epidemic.hpp"
#include "detlim/graph.hpp"
#include "detlim/hyptest.hpp"
#include "detlim/pmf.hpp"
#include "detlim/rng.hpp"
