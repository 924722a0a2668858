#pragma once

#include <nlohmann/json.hpp>

#include "uniconsist/alternatives.hpp"
#include "uniconsist/cvm_test.hpp"
#include "uniconsist/function_classes.hpp"
#include "uniconsist/mc.hpp"
#include "uniconsist/quad_test.hpp"
#include "uniconsist/report.hpp"
#include "uniconsist/signal.hpp"

namespace uniconsist {

// Insertion-ordered so serialized field order is deterministic.
using Json = nlohmann::ordered_json;

Json to_json(const SignalSpec& signal);
SignalSpec signal_from_json(const Json& j);

// {r, gamma, c, J, n_list, mode}. J is a number for a fixed truncation; otherwise
// the per-level rule uses J_factor.
Json profile_to_json(const KappaProfile& profile);
KappaProfile profile_from_json(const Json& j);
Json to_json(const AssumptionReport& report);

Json to_json(const TestReport& report);
Json to_json(const MCEstimate& estimate);

Json to_json(const CvmNullTable& table);
CvmNullTable null_table_from_json(const Json& j);

Json to_json(const AlternativeSequence& seq);
AlternativeSequence sequence_from_json(const Json& j);
Json to_json(const Classification& c);

Json to_json(const SetDescriptor& set);
SetDescriptor set_from_json(const Json& j);
Json to_json(const WidthSequence& w);
Json to_json(const CompactnessVerdict& v);

}  // namespace uniconsist
