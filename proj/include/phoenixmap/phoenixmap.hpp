#ifndef PHOENIXMAP_PHOENIXMAP_HPP
#define PHOENIXMAP_PHOENIXMAP_HPP

#include "phoenixmap/error.hpp"
#include "phoenixmap/geometry.hpp"
#include "phoenixmap/curve.hpp"
#include "phoenixmap/density.hpp"
#include "phoenixmap/legend.hpp"
#include "phoenixmap/color.hpp"
#include "phoenixmap/raster.hpp"
#include "phoenixmap/render.hpp"
#include "phoenixmap/io.hpp"
#include "phoenixmap/pipeline.hpp"

#endif
