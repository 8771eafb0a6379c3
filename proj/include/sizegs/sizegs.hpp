#pragma once

#include "sizegs/codec.hpp"
#include "sizegs/error.hpp"
#include "sizegs/importance.hpp"
#include "sizegs/mckp.hpp"
#include "sizegs/model.hpp"
#include "sizegs/numeric.hpp"
#include "sizegs/parallel.hpp"
#include "sizegs/ply_io.hpp"
#include "sizegs/quantizer.hpp"
#include "sizegs/range_coder.hpp"
#include "sizegs/search.hpp"
#include "sizegs/size_model.hpp"
#include "sizegs/synth.hpp"
