#pragma once
// Umbrella header for the molcomm library.
#include "molcomm/channel.hpp"
#include "molcomm/constellation.hpp"
#include "molcomm/decoder.hpp"
#include "molcomm/evaluation.hpp"
#include "molcomm/reception.hpp"
#include "molcomm/scenario.hpp"
#include "molcomm/version.hpp"
