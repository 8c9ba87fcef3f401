#pragma once

#include "real.hpp"
#include "algebra.hpp"
#include "interval.hpp"
#include "words.hpp"
#include "sync.hpp"
#include "rect.hpp"
#include "domain.hpp"
#include "planar.hpp"
#include "measure.hpp"
#include "expansive.hpp"
#include "csv.hpp"
