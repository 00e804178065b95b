#pragma once

// Umbrella header: the whole pipeline, in dependency order.

#include "piecevec/errors.hpp"
#include "piecevec/version.hpp"

#include "piecevec/util/digest.hpp"
#include "piecevec/util/rng.hpp"
#include "piecevec/util/text.hpp"

#include "piecevec/chess/types.hpp"
#include "piecevec/chess/bitboard.hpp"
#include "piecevec/chess/move.hpp"
#include "piecevec/chess/position.hpp"
#include "piecevec/chess/movegen.hpp"
#include "piecevec/chess/san.hpp"

#include "piecevec/zobrist.hpp"

#include "piecevec/data/records.hpp"
#include "piecevec/data/mlog.hpp"
#include "piecevec/data/pgn.hpp"
#include "piecevec/data/ingest.hpp"
#include "piecevec/data/split.hpp"

#include "piecevec/counts.hpp"

#include "piecevec/factor/pca.hpp"
#include "piecevec/factor/nmf.hpp"
#include "piecevec/factor/model_io.hpp"
#include "piecevec/factor/report.hpp"

#include "piecevec/predict.hpp"

#include "piecevec/engine/engine.hpp"
#include "piecevec/engine/process.hpp"
#include "piecevec/engine/random_mover.hpp"
#include "piecevec/engine/uci_client.hpp"
#include "piecevec/engine/selfplay.hpp"

#include "piecevec/manifest.hpp"
