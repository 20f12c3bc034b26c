#pragma once

#include "hdtac/core/basis.hpp"
#include "hdtac/core/binary_io.hpp"
#include "hdtac/core/errors.hpp"
#include "hdtac/core/hypervector.hpp"
#include "hdtac/core/parallel.hpp"
#include "hdtac/core/rng.hpp"
#include "hdtac/core/window.hpp"
#include "hdtac/dataset/ingest.hpp"
#include "hdtac/dataset/processing.hpp"
#include "hdtac/dataset/records.hpp"
#include "hdtac/encoders/config.hpp"
#include "hdtac/encoders/density.hpp"
#include "hdtac/encoders/encoder.hpp"
#include "hdtac/encoders/ngram.hpp"
#include "hdtac/encoders/sinusoid.hpp"
#include "hdtac/eval/metrics.hpp"
#include "hdtac/features/catalog.hpp"
#include "hdtac/features/mfcc.hpp"
#include "hdtac/features/spectral.hpp"
#include "hdtac/features/stats.hpp"
#include "hdtac/models/memory.hpp"
#include "hdtac/models/train.hpp"
#include "hdtac/pipeline/config.hpp"
#include "hdtac/pipeline/pipeline.hpp"
#include "hdtac/pipeline/synthetic.hpp"
