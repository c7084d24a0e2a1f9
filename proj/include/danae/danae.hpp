#pragma once

#include "danae/attitude_kf.hpp"
#include "danae/danae_model.hpp"
#include "danae/dataio/csv.hpp"
#include "danae/dataio/keyvalue.hpp"
#include "danae/dataio/loaders.hpp"
#include "danae/dataio/quaternion.hpp"
#include "danae/dataio/split.hpp"
#include "danae/dataio/synth.hpp"
#include "danae/dataio/windows.hpp"
#include "danae/errors.hpp"
#include "danae/evalkit.hpp"
#include "danae/nn/adam.hpp"
#include "danae/nn/autodiff.hpp"
#include "danae/nn/checkpoint.hpp"
#include "danae/nn/conv.hpp"
#include "danae/nn/tensor.hpp"
#include "danae/types.hpp"

#define DANAE_VERSION "0.1.0"
