#pragma once

// Umbrella header: absorbing boundary conditions for the 1D time-dependent
// Schrodinger equation from the Titchmarsh-Weyl m-function, with a
// frequency-domain solver and a rational-ABC time-domain solver.

#include "twabc/banded.hpp"
#include "twabc/complex_math.hpp"
#include "twabc/config.hpp"
#include "twabc/fem.hpp"
#include "twabc/freq_solver.hpp"
#include "twabc/halfderiv.hpp"
#include "twabc/io.hpp"
#include "twabc/mesh.hpp"
#include "twabc/mfunction.hpp"
#include "twabc/potential.hpp"
#include "twabc/rational.hpp"
#include "twabc/reference.hpp"
#include "twabc/runner.hpp"
#include "twabc/time_solver.hpp"
