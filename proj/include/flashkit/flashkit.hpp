#pragma once

#include "flashkit/color.hpp"
#include "flashkit/detector.hpp"
#include "flashkit/errors.hpp"
#include "flashkit/json_io.hpp"
#include "flashkit/mitigation.hpp"
#include "flashkit/oracle.hpp"
#include "flashkit/pipeline.hpp"
#include "flashkit/rng.hpp"
#include "flashkit/synthgen.hpp"
#include "flashkit/util.hpp"
#include "flashkit/video.hpp"
