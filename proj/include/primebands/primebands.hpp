#pragma once

#include "primebands/batemanhorn.hpp"
#include "primebands/cramer.hpp"
#include "primebands/euler_product.hpp"
#include "primebands/logint.hpp"
#include "primebands/moments.hpp"
#include "primebands/primes.hpp"
#include "primebands/report.hpp"
#include "primebands/stats.hpp"
#include "primebands/tuples.hpp"
