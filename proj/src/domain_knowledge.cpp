#include "radice/domain_knowledge.hpp"

#include <fstream>
#include <functional>

#include "radice/error.hpp"

namespace radice {

int PartialGraphKnowledge::level_of(const std::string& metric) const {
    auto it = levels.find(metric);
    return it == levels.end() ? default_level : it->second;
}

int level_of(const DomainKnowledgeModel& model, const std::string& metric) { return model.partial.level_of(metric); }

bool sign_permits(const DomainKnowledgeModel& model, const std::string& metric, double corr) {
    auto it = model.refinement.sign_rules.find(metric);
    if (it == model.refinement.sign_rules.end()) return true;
    return it->second == Sign::Positive ? corr > 0.0 : corr < 0.0;
}

void validate(const DomainKnowledgeModel& model, const std::optional<std::set<std::string>>& universe) {
    const auto& pk = model.partial;
    auto check_known = [&](const std::string& m, const char* where) {
        if (universe && !universe->contains(m)) {
            throw InvalidArgument(std::string("domain knowledge: unknown metric '") + m + "' in " + where);
        }
    };

    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [u, v] : pk.domain_edges) {
        check_known(u, "edges");
        check_known(v, "edges");
        if (u == v) throw InvalidArgument("domain edges create a cycle (self loop on '" + u + "')");
        if (pk.level_of(u) > pk.level_of(v)) {
            throw InvalidArgument("edge contradicts levels: " + u + " (level " + std::to_string(pk.level_of(u)) +
                                  ") -> " + v + " (level " + std::to_string(pk.level_of(v)) + ")");
        }
        adj[u].push_back(v);
    }
    // Three-colour DFS for cycles.
    std::map<std::string, int> colour;
    std::function<bool(const std::string&)> has_cycle = [&](const std::string& v) {
        colour[v] = 1;
        for (const auto& w : adj[v]) {
            if (colour[w] == 1) return true;
            if (colour[w] == 0 && has_cycle(w)) return true;
        }
        colour[v] = 2;
        return false;
    };
    for (const auto& [v, _] : adj) {
        if (colour[v] == 0 && has_cycle(v)) throw InvalidArgument("domain edges create a cycle");
    }

    for (const auto& [m, _] : pk.levels) check_known(m, "levels");
    for (const auto& [m, _] : model.refinement.sign_rules) check_known(m, "rules");
}

DomainKnowledgeModel dk_from_json(const nlohmann::json& j) {
    DomainKnowledgeModel model;
    try {
        if (!j.is_object()) throw ParseError("domain knowledge JSON must be an object");
        if (j.contains("levels")) {
            for (const auto& [k, v] : j.at("levels").items()) model.partial.levels[k] = v.get<int>();
        }
        if (j.contains("edges")) {
            for (const auto& e : j.at("edges")) {
                if (!e.is_array() || e.size() != 2) throw ParseError("domain knowledge: edge must be [from, to]");
                model.partial.domain_edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
            }
        }
        if (j.contains("rules")) {
            for (const auto& [k, v] : j.at("rules").items()) {
                const auto s = v.get<std::string>();
                if (s == "positive") {
                    model.refinement.sign_rules[k] = Sign::Positive;
                } else if (s == "negative") {
                    model.refinement.sign_rules[k] = Sign::Negative;
                } else {
                    throw ParseError("domain knowledge: rule for '" + k + "' must be \"positive\" or \"negative\"");
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("domain knowledge JSON: ") + e.what());
    }
    return model;
}

nlohmann::json dk_to_json(const DomainKnowledgeModel& model) {
    nlohmann::json levels = nlohmann::json::object();
    for (const auto& [k, v] : model.partial.levels) levels[k] = v;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [u, v] : model.partial.domain_edges) edges.push_back({u, v});
    nlohmann::json rules = nlohmann::json::object();
    for (const auto& [k, s] : model.refinement.sign_rules) rules[k] = s == Sign::Positive ? "positive" : "negative";
    return {{"levels", levels}, {"edges", edges}, {"rules", rules}};
}

DomainKnowledgeModel load_dk(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open domain knowledge file '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed domain knowledge JSON '" + path.string() + "': " + e.what());
    }
    auto model = dk_from_json(j);
    validate(model);
    return model;
}

void save_dk(const DomainKnowledgeModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << dk_to_json(model).dump(2) << '\n';
}

}  // namespace radice
