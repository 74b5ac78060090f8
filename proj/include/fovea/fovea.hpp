#pragma once

#include "fovea/bench.hpp"
#include "fovea/blobs.hpp"
#include "fovea/color.hpp"
#include "fovea/enhancement.hpp"
#include "fovea/error.hpp"
#include "fovea/evaluation.hpp"
#include "fovea/image.hpp"
#include "fovea/io.hpp"
#include "fovea/morphology.hpp"
#include "fovea/phantom.hpp"
#include "fovea/pipeline.hpp"
#include "fovea/render.hpp"
#include "fovea/segmentation.hpp"
#include "fovea/serialize.hpp"
