#pragma once

#include "dtpca/error.hpp"
#include "dtpca/image.hpp"
#include "dtpca/landmarks.hpp"
#include "dtpca/manifest.hpp"
#include "dtpca/geometry/point.hpp"
#include "dtpca/geometry/predicates.hpp"
#include "dtpca/geometry/area.hpp"
#include "dtpca/geometry/delaunay.hpp"
#include "dtpca/eigenface.hpp"
#include "dtpca/recognizer.hpp"
#include "dtpca/evalharness.hpp"
