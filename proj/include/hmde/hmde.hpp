#pragma once

#include "hmde/errors.hpp"
#include "hmde/regulated.hpp"
#include "hmde/field.hpp"
#include "hmde/ks_integral.hpp"
#include "hmde/solver.hpp"
#include "hmde/certificate.hpp"
#include "hmde/frontends.hpp"
#include "hmde/asymptotics.hpp"
#include "hmde/dependence.hpp"
