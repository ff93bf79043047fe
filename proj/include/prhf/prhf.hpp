#pragma once

#include "prhf/analysis.hpp"
#include "prhf/bessel.hpp"
#include "prhf/config.hpp"
#include "prhf/coulomb.hpp"
#include "prhf/error.hpp"
#include "prhf/fock.hpp"
#include "prhf/functional.hpp"
#include "prhf/greens.hpp"
#include "prhf/linalg.hpp"
#include "prhf/model.hpp"
#include "prhf/radial.hpp"
#include "prhf/report.hpp"
#include "prhf/scf.hpp"
#include "prhf/verify.hpp"
