#pragma once

#include "dwta/core.hpp"
#include "dwta/parallel.hpp"
#include "dwta/imgproc.hpp"
#include "dwta/io.hpp"
#include "dwta/flow.hpp"
#include "dwta/warp.hpp"
#include "dwta/aggregate.hpp"
#include "dwta/texture.hpp"
#include "dwta/quality.hpp"
#include "dwta/synth.hpp"
#include "dwta/report.hpp"
