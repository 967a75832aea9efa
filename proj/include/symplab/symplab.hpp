#pragma once

#include "errors.hpp"
#include "rng.hpp"
#include "linalg.hpp"
#include "shift.hpp"
#include "cocycle.hpp"
#include "generators.hpp"
#include "lyapunov.hpp"
#include "holonomy.hpp"
#include "spectral.hpp"
#include "perturbation.hpp"
#include "experiments.hpp"
#include "io.hpp"
