#pragma once

#include "fsoegc/egc.hpp"
#include "fsoegc/errors.hpp"
#include "fsoegc/mc.hpp"
#include "fsoegc/meijer.hpp"
#include "fsoegc/mixture.hpp"
#include "fsoegc/pointing.hpp"
#include "fsoegc/quadrature.hpp"
#include "fsoegc/rng.hpp"
#include "fsoegc/specfun.hpp"
#include "fsoegc/version.hpp"
