#include "priograph/corpus.hpp"

#include <set>
#include <sstream>

namespace priograph::corpus {

std::string conflict_type_string(ConflictType type) {
    switch (type) {
    case ConflictType::instruction: return "instruction";
    case ConflictType::information: return "information";
    case ConflictType::ethics: return "ethics";
    case ConflictType::value: return "value";
    case ConflictType::preference: return "preference";
    }
    return "?";
}

void ScenarioRecord::validate() const {
    if (id.empty()) fail(ErrorCode::invalid_field, "scenario id empty");
    option_a.validate();
    option_b.validate();
    if (option_a.id == option_b.id)
        fail(ErrorCode::invalid_field, "scenario '" + id + "': options must differ");
    context.validate();
    for (const auto& variant : context_variants) variant.validate();
}

std::vector<ScenarioRecord> load_corpus(const std::string& path) {
    json j = load_json_file(path);
    auto scenarios = j.at("scenarios").get<std::vector<ScenarioRecord>>();
    std::set<std::string> ids;
    for (const auto& scenario : scenarios)
        if (!ids.insert(scenario.id).second)
            fail(ErrorCode::duplicate_id, "corpus repeats scenario id '" + scenario.id + "'");
    return scenarios;
}

std::string serialize_corpus(const std::vector<ScenarioRecord>& scenarios) {
    json j{{"scenarios", scenarios}, {"format_version", 1}};
    return j.dump(2) + "\n";
}

SuiteReport run_suite(const std::vector<ScenarioRecord>& scenarios,
                      const oracle::OracleSpec& spec, const graph::MeasurementPolicy& policy) {
    SuiteReport report;
    for (const auto& scenario : scenarios) {
        ScenarioResult result;
        result.scenario_id = scenario.id;
        Tally& tally = report.tallies[conflict_type_string(scenario.conflict_type)];
        try {
            MeasurementOutcome outcome =
                graph::measure_pair(spec, scenario.option_a, scenario.option_b, scenario.context,
                                    policy);
            result.outcome = outcome;
            switch (outcome.relation) {
            case Relation::first_over_second: tally.a_wins++; break;
            case Relation::second_over_first: tally.b_wins++; break;
            case Relation::indeterminate: tally.indeterminate++; break;
            }

            std::vector<std::string> flips;
            for (const auto& variant : scenario.context_variants) {
                MeasurementOutcome alt = graph::measure_pair(spec, scenario.option_a,
                                                             scenario.option_b, variant, policy);
                if (alt.relation != outcome.relation) flips.push_back(variant.id);
            }
            if (!flips.empty()) report.flip_map[scenario.id] = std::move(flips);
        } catch (const Error& e) {
            result.error = e.what();
            tally.indeterminate++;
        }
        report.results.push_back(std::move(result));
    }
    return report;
}

std::string report_table(const std::vector<ScenarioRecord>& scenarios, const SuiteReport& report) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-32s %-12s %-24s %-12s %s\n", "scenario", "type",
                  "winner", "margin", "note");
    out << line;
    out << std::string(96, '-') << "\n";
    for (std::size_t i = 0; i < scenarios.size() && i < report.results.size(); ++i) {
        const auto& scenario = scenarios[i];
        const auto& result = report.results[i];
        std::string winner = "-", margin = "-", note;
        if (scenario.irreducible) note = "irreducible";
        if (!result.error.empty()) {
            note = note.empty() ? "error: " + result.error : note + "; error: " + result.error;
        } else if (result.outcome) {
            switch (result.outcome->relation) {
            case Relation::first_over_second: winner = scenario.option_a.id; break;
            case Relation::second_over_first: winner = scenario.option_b.id; break;
            case Relation::indeterminate: winner = "(indeterminate)"; break;
            }
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", result.outcome->margin);
            margin = buf;
        }
        std::snprintf(line, sizeof(line), "%-32s %-12s %-24s %-12s %s\n", scenario.id.c_str(),
                      conflict_type_string(scenario.conflict_type).c_str(), winner.c_str(),
                      margin.c_str(), note.c_str());
        out << line;
    }
    return out.str();
}

void to_json(json& j, const ScenarioRecord& v) {
    j = json{{"id", v.id},
             {"conflict_type", v.conflict_type},
             {"description", v.description},
             {"option_a", v.option_a},
             {"option_b", v.option_b},
             {"context", v.context},
             {"irreducible", v.irreducible}};
    if (!v.context_variants.empty()) j["context_variants"] = v.context_variants;
}

void from_json(const json& j, ScenarioRecord& v) {
    v.id = to_lower(j.at("id").get<std::string>());
    v.conflict_type = parse_enum<ConflictType>(j.at("conflict_type"), "conflict_type");
    v.description = j.value("description", "");
    v.option_a = j.at("option_a").get<Node>();
    v.option_b = j.at("option_b").get<Node>();
    v.context = j.at("context").get<Context>();
    v.context_variants = j.value("context_variants", std::vector<Context>{});
    v.irreducible = j.value("irreducible", false);
    v.validate();
}

void to_json(json& j, const Tally& v) {
    j = json{{"a_wins", v.a_wins}, {"b_wins", v.b_wins}, {"indeterminate", v.indeterminate}};
}

void from_json(const json& j, Tally& v) {
    v.a_wins = j.value("a_wins", 0);
    v.b_wins = j.value("b_wins", 0);
    v.indeterminate = j.value("indeterminate", 0);
}

void to_json(json& j, const ScenarioResult& v) {
    j = json{{"scenario_id", v.scenario_id},
             {"outcome", v.outcome ? json(*v.outcome) : json(nullptr)},
             {"error", v.error}};
}

void from_json(const json& j, ScenarioResult& v) {
    v.scenario_id = j.at("scenario_id").get<std::string>();
    if (j.contains("outcome") && !j.at("outcome").is_null())
        v.outcome = j.at("outcome").get<MeasurementOutcome>();
    else
        v.outcome.reset();
    v.error = j.value("error", "");
}

void to_json(json& j, const SuiteReport& v) {
    j = json{{"results", v.results}, {"tallies", v.tallies}, {"flip_map", v.flip_map}};
}

void from_json(const json& j, SuiteReport& v) {
    v.results = j.value("results", std::vector<ScenarioResult>{});
    v.tallies = j.value("tallies", std::map<std::string, Tally>{});
    v.flip_map = j.value("flip_map", std::map<std::string, std::vector<std::string>>{});
}

} // namespace priograph::corpus
