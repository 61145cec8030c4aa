#pragma once

#include "hemtsq/errors.hpp"
#include "hemtsq/constants.hpp"
#include "hemtsq/circuit_model.hpp"
#include "hemtsq/fock_space.hpp"
#include "hemtsq/hamiltonian.hpp"
#include "hemtsq/dynamics.hpp"
#include "hemtsq/observables.hpp"
#include "hemtsq/classical_response.hpp"
#include "hemtsq/config.hpp"
#include "hemtsq/pipeline.hpp"
#include "hemtsq/sweep.hpp"
