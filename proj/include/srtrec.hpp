#pragma once

#include "srtrec/alphabet.hpp"
#include "srtrec/blstm.hpp"
#include "srtrec/checkpoint.hpp"
#include "srtrec/config.hpp"
#include "srtrec/ctc.hpp"
#include "srtrec/decode.hpp"
#include "srtrec/distribution.hpp"
#include "srtrec/error.hpp"
#include "srtrec/eval.hpp"
#include "srtrec/geometry.hpp"
#include "srtrec/ink.hpp"
#include "srtrec/inkml.hpp"
#include "srtrec/latex.hpp"
#include "srtrec/latex_parse.hpp"
#include "srtrec/lg.hpp"
#include "srtrec/losses.hpp"
#include "srtrec/oracle.hpp"
#include "srtrec/path_extract.hpp"
#include "srtrec/paths.hpp"
#include "srtrec/service.hpp"
#include "srtrec/srt.hpp"
#include "srtrec/srt_json.hpp"
#include "srtrec/synth.hpp"
#include "srtrec/train.hpp"
#include "srtrec/tree_build.hpp"
