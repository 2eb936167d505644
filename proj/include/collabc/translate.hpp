#pragma once

#include "collabc/csp.hpp"
#include "collabc/model.hpp"

namespace collabc::translate {

struct Options {
  int channel_capacity = 1;  // FIFO slots per message channel
};

// Maps a collaboration model to a CSP# specification: one process definition
// per pool, one channel per message flow, and a System definition composing
// all participants in parallel. Throws CompileError when the model fails
// structural validation.
csp::CspSpec translate(const model::CollaborationModel& m, Options opts = {});

}  // namespace collabc::translate
