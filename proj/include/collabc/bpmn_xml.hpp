#pragma once

#include <string>

#include "collabc/model.hpp"

namespace collabc::bpmn {

// Parses a BPMN 2.0 collaboration (XML text) into the structured model.
// Supported subset: one process per participant; task/sendTask/receiveTask;
// exclusive, parallel and event-based gateways in matched split/join pairs;
// a single plain start and end event per process; message flows connecting a
// send task to a receive task, where the flow id names the channel and the
// flow name names the message. Anything else raises CompileError with the
// offending element's id.
model::CollaborationModel parse_bpmn_xml(const std::string& xml_text);

}  // namespace collabc::bpmn
