#pragma once

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"
#include "wordmap/eval.hpp"
#include "wordmap/im.hpp"
#include "wordmap/mapping.hpp"
#include "wordmap/parallel.hpp"
#include "wordmap/pipeline.hpp"
#include "wordmap/random.hpp"
#include "wordmap/spectral.hpp"
#include "wordmap/synth.hpp"
#include "wordmap/transform.hpp"
