#pragma once

#include "bo/birkhoff.hpp"
#include "bo/counterexample.hpp"
#include "bo/flow.hpp"
#include "bo/hardy.hpp"
#include "bo/inverse.hpp"
#include "bo/io.hpp"
#include "bo/lax.hpp"
#include "bo/probes.hpp"
#include "bo/quadrature.hpp"
