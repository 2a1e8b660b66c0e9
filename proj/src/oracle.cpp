#include "priograph/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include <httplib.h>

namespace priograph::oracle {

void ContextPredicate::validate() const {
    if (!user_profile_equals && !framing_contains && !claim_present && !timestamp_after)
        fail(ErrorCode::invalid_field, "context predicate with no conditions");
}

bool ContextPredicate::matches(const Context& ctx) const {
    if (user_profile_equals) {
        auto it = ctx.user_profile.find(user_profile_equals->first);
        if (it == ctx.user_profile.end() || it->second != user_profile_equals->second) return false;
    }
    if (framing_contains) {
        if (to_lower(ctx.framing).find(to_lower(*framing_contains)) == std::string::npos)
            return false;
    }
    if (claim_present) {
        std::string key = to_lower(*claim_present);
        bool found = false;
        for (const auto& claim : ctx.environment_claims)
            for (const auto& subject : claim.subject_keys)
                if (subject == key) found = true;
        if (!found) return false;
    }
    if (timestamp_after && ctx.timestamp <= *timestamp_after) return false;
    return true;
}

void OracleSpec::validate() const {
    switch (kind) {
    case OracleKind::lexicographic: {
        if (lexicographic.empty())
            fail(ErrorCode::invalid_field, "lexicographic oracle needs a node-id list");
        if (!table.empty() || !remote.endpoint.empty())
            fail(ErrorCode::invalid_field, "lexicographic oracle carries foreign fields");
        std::set<std::string> seen;
        for (const auto& id : lexicographic)
            if (!seen.insert(id).second)
                fail(ErrorCode::duplicate_id, "lexicographic list repeats '" + id + "'");
        break;
    }
    case OracleKind::table: {
        if (!lexicographic.empty() || !remote.endpoint.empty())
            fail(ErrorCode::invalid_field, "table oracle carries foreign fields");
        std::set<NodePair> pairs;
        for (const auto& rule : table) {
            if (rule.pair.first >= rule.pair.second)
                fail(ErrorCode::invalid_field, "table rule pair not in canonical order");
            if (!pairs.insert(rule.pair).second)
                fail(ErrorCode::duplicate_id, "two rules for pair (" + rule.pair.first + ", " +
                                                  rule.pair.second + ")");
            rule.base.validate();
            for (const auto& [pred, dist] : rule.overrides) {
                pred.validate();
                dist.validate();
            }
        }
        break;
    }
    case OracleKind::remote:
        if (remote.endpoint.empty()) fail(ErrorCode::invalid_field, "remote oracle needs endpoint");
        if (!lexicographic.empty() || !table.empty())
            fail(ErrorCode::invalid_field, "remote oracle carries foreign fields");
        break;
    }
}

OracleSpec OracleSpec::load(const std::string& path) {
    return load_json_file(path).get<OracleSpec>();
}

OracleSpec without_overrides(OracleSpec spec) {
    for (auto& rule : spec.table) rule.overrides.clear();
    return spec;
}

namespace {

DecisionDistribution table_decide(const OracleSpec& spec, const std::string& a1,
                                  const std::string& a2, const Context& ctx) {
    auto [lo, hi] = std::minmax(a1, a2);
    for (const auto& rule : spec.table) {
        if (rule.pair != NodePair{lo, hi}) continue;
        DecisionDistribution dist = rule.base;
        for (const auto& [pred, override_dist] : rule.overrides)
            if (pred.matches(ctx)) {
                dist = override_dist;
                break;
            }
        return a1 == lo ? dist : dist.swapped();
    }
    fail(ErrorCode::unknown_pair, "no table rule for pair (" + lo + ", " + hi + ")");
}

DecisionDistribution lexicographic_decide(const OracleSpec& spec, const std::string& a1,
                                          const std::string& a2) {
    auto rank = [&](const std::string& id) {
        auto it = std::find(spec.lexicographic.begin(), spec.lexicographic.end(), id);
        if (it == spec.lexicographic.end())
            fail(ErrorCode::unknown_node, "node '" + id + "' not in lexicographic order");
        return it - spec.lexicographic.begin();
    };
    return rank(a1) < rank(a2) ? DecisionDistribution{1, 0, 0} : DecisionDistribution{0, 1, 0};
}

// Counting semaphore with a runtime cap, keyed per endpoint.
class InFlightGate {
public:
    explicit InFlightGate(int cap) : cap_(cap) {}
    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return in_flight_ < cap_; });
        ++in_flight_;
    }
    void release() {
        std::lock_guard lock(mutex_);
        --in_flight_;
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int cap_;
    int in_flight_ = 0;
};

InFlightGate& gate_for(const std::string& endpoint, int cap) {
    static std::mutex registry_mutex;
    static std::unordered_map<std::string, std::unique_ptr<InFlightGate>> registry;
    std::lock_guard lock(registry_mutex);
    auto& slot = registry[endpoint];
    if (!slot) slot = std::make_unique<InFlightGate>(cap);
    return *slot;
}

} // namespace

DecisionDistribution decide(const OracleSpec& spec, const Node& a1, const Node& a2,
                            const Context& ctx) {
    if (a1.id == a2.id) fail(ErrorCode::invalid_field, "decide() needs two distinct nodes");
    switch (spec.kind) {
    case OracleKind::lexicographic:
        return lexicographic_decide(spec, a1.id, a2.id);
    case OracleKind::table:
        return table_decide(spec, a1.id, a2.id, ctx);
    case OracleKind::remote:
        return remote_decide(spec, a1, a2, ctx);
    }
    fail(ErrorCode::invalid_field, "bad oracle kind");
}

std::pair<double, double> exact_win_probability(const OracleSpec& spec, const Node& a1,
                                                const Node& a2, const Context& ctx) {
    if (spec.kind == OracleKind::remote)
        fail(ErrorCode::unsupported, "exact_win_probability: remote oracles not supported");
    DecisionDistribution d = decide(spec, a1, a2, ctx);
    return {d.p_first, d.p_second};
}

DecisionDistribution remote_decide(const OracleSpec& spec, const Node& a1, const Node& a2,
                                   const Context& ctx) {
    if (spec.remote.endpoint.empty()) fail(ErrorCode::invalid_field, "remote endpoint not set");

    // endpoint = http://host:port/path
    std::string endpoint = spec.remote.endpoint;
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        fail(ErrorCode::invalid_field, "bad endpoint: " + endpoint);
    auto path_start = endpoint.find('/', scheme_end + 3);
    std::string host = endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

    json body{{"a1", a1}, {"a2", a2}, {"context", ctx}};
    std::string payload = body.dump();

    InFlightGate& gate = gate_for(endpoint, spec.remote.max_in_flight);
    gate.acquire();
    struct Release {
        InFlightGate& g;
        ~Release() { g.release(); }
    } release{gate};

    httplib::Client client(host);
    client.set_connection_timeout(0, spec.remote.timeout_ms * 1000);
    client.set_read_timeout(0, spec.remote.timeout_ms * 1000);

    std::string last_error;
    for (int attempt = 0; attempt <= spec.remote.retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(spec.remote.backoff_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        auto result = client.Post(path, payload, "application/json");
        if (!result) {
            last_error = httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_error = "HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200)
            fail(ErrorCode::malformed_response, "HTTP " + std::to_string(result->status));
        try {
            json response = json::parse(result->body);
            return normalize_distribution(response.at("p_first").get<double>(),
                                          response.at("p_second").get<double>(),
                                          response.value("p_abstain", 0.0));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::all_zero_distribution) throw;
            fail(ErrorCode::malformed_response, std::string("bad response body: ") + e.what());
        } catch (const std::exception& e) {
            fail(ErrorCode::malformed_response, std::string("bad response body: ") + e.what());
        }
    }
    fail(ErrorCode::remote_unreachable, endpoint + ": " + last_error);
}

void to_json(json& j, const ContextPredicate& v) {
    j = json::object();
    if (v.user_profile_equals)
        j["user_profile_equals"] = {{"key", v.user_profile_equals->first},
                                    {"value", v.user_profile_equals->second}};
    if (v.framing_contains) j["framing_contains"] = *v.framing_contains;
    if (v.claim_present) j["claim_present"] = *v.claim_present;
    if (v.timestamp_after) j["timestamp_after"] = format_instant(*v.timestamp_after);
}

void from_json(const json& j, ContextPredicate& v) {
    v = {};
    if (j.contains("user_profile_equals"))
        v.user_profile_equals = {j.at("user_profile_equals").at("key").get<std::string>(),
                                 j.at("user_profile_equals").at("value").get<std::string>()};
    if (j.contains("framing_contains")) v.framing_contains = j.at("framing_contains").get<std::string>();
    if (j.contains("claim_present")) v.claim_present = to_lower(j.at("claim_present").get<std::string>());
    if (j.contains("timestamp_after"))
        v.timestamp_after = parse_instant(j.at("timestamp_after").get<std::string>());
    v.validate();
}

void to_json(json& j, const TableRule& v) {
    json overrides = json::array();
    for (const auto& [pred, dist] : v.overrides)
        overrides.push_back({{"when", pred}, {"distribution", dist}});
    j = json{{"pair", v.pair}, {"base", v.base}, {"overrides", overrides}};
}

void from_json(const json& j, TableRule& v) {
    auto raw = j.at("pair").get<NodePair>();
    raw.first = to_lower(raw.first);
    raw.second = to_lower(raw.second);
    if (raw.first > raw.second) fail(ErrorCode::invalid_field, "table rule pair must be sorted");
    v.pair = raw;
    v.base = j.at("base").get<DecisionDistribution>();
    v.overrides.clear();
    for (const auto& entry : j.value("overrides", json::array()))
        v.overrides.emplace_back(entry.at("when").get<ContextPredicate>(),
                                 entry.at("distribution").get<DecisionDistribution>());
}

void to_json(json& j, const RemoteConfig& v) {
    j = json{{"endpoint", v.endpoint},
             {"timeout_ms", v.timeout_ms},
             {"retries", v.retries},
             {"backoff_ms", v.backoff_ms},
             {"max_in_flight", v.max_in_flight}};
}

void from_json(const json& j, RemoteConfig& v) {
    v.endpoint = j.at("endpoint").get<std::string>();
    v.timeout_ms = j.value("timeout_ms", 5000);
    v.retries = j.value("retries", 2);
    v.backoff_ms = j.value("backoff_ms", 500);
    v.max_in_flight = j.value("max_in_flight", 8);
}

void to_json(json& j, const OracleSpec& v) {
    j = json{{"kind", v.kind}};
    switch (v.kind) {
    case OracleKind::lexicographic: j["lexicographic"] = v.lexicographic; break;
    case OracleKind::table: j["table"] = v.table; break;
    case OracleKind::remote: j["remote"] = v.remote; break;
    }
}

void from_json(const json& j, OracleSpec& v) {
    v = {};
    v.kind = parse_enum<OracleKind>(j.at("kind"), "oracle kind");
    switch (v.kind) {
    case OracleKind::lexicographic:
        v.lexicographic = j.at("lexicographic").get<std::vector<std::string>>();
        for (auto& id : v.lexicographic) id = to_lower(id);
        break;
    case OracleKind::table:
        v.table = j.at("table").get<std::vector<TableRule>>();
        break;
    case OracleKind::remote:
        v.remote = j.at("remote").get<RemoteConfig>();
        break;
    }
    v.validate();
}

} // namespace priograph::oracle
