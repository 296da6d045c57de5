#include "psta/serialize.hpp"

#include "psta/syntax.hpp"

#include <json.hpp>

#include <algorithm>

namespace psta {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) { throw Error("schema-error", path + ": " + msg); }

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) schema(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schema(path, std::string("missing field \"") + key + "\"");
    return *it;
}

std::string str(const json& j, const char* key, const std::string& path) {
    const auto& v = need(j, key, path);
    if (!v.is_string()) schema(path + "." + key, "expected a string");
    return v.get<std::string>();
}

const json& pair_of(const json& j, const char* key, const std::string& path) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) schema(path + "." + key, "expected a two-element array");
    return v;
}

json term_json(const Term& t) {
    switch (t->kind) {
    case TermKind::Var: return {{"var", t->name}};
    case TermKind::Lam: return {{"lam", t->name}, {"body", term_json(t->kids[0])}};
    case TermKind::BangLam: return {{"bang_lam", t->name}, {"body", term_json(t->kids[0])}};
    case TermKind::App: return {{"app", json::array({term_json(t->kids[0]), term_json(t->kids[1])})}};
    case TermKind::Bang: return {{"bang", term_json(t->kids[0])}};
    case TermKind::Der: return {{"der", term_json(t->kids[0])}};
    case TermKind::Pair: return {{"pair", json::array({term_json(t->kids[0]), term_json(t->kids[1])})}};
    case TermKind::Proj: return {{"proj", term_json(t->kids[0])}};
    case TermKind::Copy:
        return {{"copy",
                 {{"value", term_json(t->kids[0])},
                  {"scrutinee", term_json(t->kids[1])},
                  {"x1", t->name},
                  {"x2", t->name2},
                  {"left", term_json(t->kids[2])},
                  {"right", term_json(t->kids[3])}}}};
    }
    return nullptr;
}

// The constructor tag of a node, whatever the key order.
std::string tag_of(const json& j, std::initializer_list<const char*> tags, const std::string& path, const char* what) {
    std::string found;
    for (const char* t : tags)
        if (j.contains(t)) {
            if (!found.empty()) schema(path, std::string("ambiguous ") + what + ": both \"" + found + "\" and \"" + t + "\"");
            found = t;
        }
    if (found.empty()) schema(path, std::string("unknown ") + what + " constructor \"" + j.begin().key() + "\"");
    return found;
}

Term term_from(const json& j, const std::string& path) {
    if (!j.is_object() || j.empty()) schema(path, "expected a term object");
    const std::string key = tag_of(j, {"var", "lam", "bang_lam", "app", "pair", "bang", "der", "proj", "copy"}, path, "term");
    const auto sub = path + "." + key;
    if (key == "var") return var(str(j, "var", path));
    if (key == "lam") return lam(str(j, "lam", path), term_from(need(j, "body", path), path + ".body"));
    if (key == "bang_lam") return bang_lam(str(j, "bang_lam", path), term_from(need(j, "body", path), path + ".body"));
    if (key == "app") {
        const auto& p = pair_of(j, "app", path);
        return app(term_from(p[0], sub + "[0]"), term_from(p[1], sub + "[1]"));
    }
    if (key == "pair") {
        const auto& p = pair_of(j, "pair", path);
        return pair(term_from(p[0], sub + "[0]"), term_from(p[1], sub + "[1]"));
    }
    if (key == "bang") return bang(term_from(j.at(key), sub));
    if (key == "der") return der(term_from(j.at(key), sub));
    if (key == "proj") return proj(term_from(j.at(key), sub));
    if (key == "copy") {
        const auto& c = j.at(key);
        return copy(term_from(need(c, "value", sub), sub + ".value"), term_from(need(c, "scrutinee", sub), sub + ".scrutinee"),
                    str(c, "x1", sub), str(c, "x2", sub), term_from(need(c, "left", sub), sub + ".left"),
                    term_from(need(c, "right", sub), sub + ".right"));
    }
    schema(path, "unknown term constructor \"" + key + "\"");
}

json type_json(const Type& t) {
    switch (t->kind) {
    case TypeKind::Var: return {{"tvar", t->name}};
    case TypeKind::Imp: return {{"imp", json::array({type_json(t->kids[0]), type_json(t->kids[1])})}};
    case TypeKind::With: return {{"with", json::array({type_json(t->kids[0]), type_json(t->kids[1])})}};
    case TypeKind::Forall: return {{"forall", t->name}, {"body", type_json(t->kids[0])}};
    case TypeKind::Bang: return {{"bang", type_json(t->kids[0])}};
    case TypeKind::Meta: throw Error("unresolved-meta", "cannot serialise an unresolved type placeholder");
    }
    return nullptr;
}

Type type_from(const json& j, const std::string& path) {
    if (!j.is_object() || j.empty()) schema(path, "expected a type object");
    const std::string key = tag_of(j, {"tvar", "imp", "with", "forall", "bang"}, path, "type");
    const auto sub = path + "." + key;
    if (key == "tvar") return tvar(str(j, "tvar", path));
    if (key == "imp") {
        const auto& p = pair_of(j, "imp", path);
        return imp(type_from(p[0], sub + "[0]"), type_from(p[1], sub + "[1]"));
    }
    if (key == "with") {
        const auto& p = pair_of(j, "with", path);
        return with(type_from(p[0], sub + "[0]"), type_from(p[1], sub + "[1]"));
    }
    if (key == "forall") return forall(str(j, "forall", path), type_from(need(j, "body", path), path + ".body"));
    if (key == "bang") return tbang(type_from(j.at(key), sub));
    schema(path, "unknown type constructor \"" + key + "\"");
}

json judgment_json(const Judgment& j) {
    json ctx = json::object();
    for (const auto& [x, a] : j.context) ctx[x] = type_json(a);
    std::string text;
    for (const auto& [x, a] : j.context) text += (text.empty() ? "" : ", ") + x + ":" + print_type(a);
    text += " |- " + print_term(j.subject) + " : " + print_type(j.type);
    return {{"text", text}, {"context", ctx}, {"subject", term_json(j.subject)}, {"type", type_json(j.type)}};
}

json node_json(const Derivation& d) {
    const auto& p = d->payload;
    json j;
    j["rule"] = to_string(d->rule);
    switch (d->rule) {
    case Rule::Ax: j["var"] = p.var; j["type"] = type_json(p.type); break;
    case Rule::ImpIl:
    case Rule::ImpIe: j["var"] = p.var; break;
    case Rule::WithI:
        if (p.bare) j["bare"] = true;
        else {
            j["binder1"] = p.binder1;
            j["binder2"] = p.binder2;
        }
        break;
    case Rule::Sp: {
        json r = json::array();
        for (const auto& [x, y] : p.renaming) r.push_back({x, y});
        j["renaming"] = r;
        break;
    }
    case Rule::M: j["var"] = p.var; j["merged"] = p.merged; j["type"] = type_json(p.type); break;
    case Rule::ForallI: j["eigen"] = p.eigen; j["bound"] = p.bound; break;
    case Rule::ForallE: j["type"] = type_json(p.type); break;
    default: break;
    }
    j["conclusion"] = judgment_json(d->conclusion);
    json ps = json::array();
    for (const auto& q : d->premises) ps.push_back(node_json(q));
    j["premises"] = ps;
    return j;
}

Derivation node_from(const json& j, const std::string& path) {
    if (!j.is_object()) schema(path, "expected a derivation node");
    Rule rule;
    try {
        rule = rule_from_string(str(j, "rule", path));
    } catch (const Error& e) {
        if (e.code() == "schema-error") throw;
        schema(path + ".rule", e.what());
    }
    std::vector<Derivation> ps;
    if (j.contains("premises")) {
        const auto& a = j.at("premises");
        if (!a.is_array()) schema(path + ".premises", "expected an array");
        for (std::size_t i = 0; i < a.size(); ++i) ps.push_back(node_from(a[i], path + ".premises[" + std::to_string(i) + "]"));
    }
    Payload p;
    if (j.contains("var")) p.var = str(j, "var", path);
    if (j.contains("type")) p.type = type_from(j.at("type"), path + ".type");
    if (j.contains("merged")) {
        const auto& m = j.at("merged");
        if (!m.is_array()) schema(path + ".merged", "expected an array of names");
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!m[i].is_string()) schema(path + ".merged[" + std::to_string(i) + "]", "expected a string");
            p.merged.push_back(m[i].get<std::string>());
        }
    }
    if (j.contains("renaming")) {
        const auto& r = j.at("renaming");
        if (!r.is_array()) schema(path + ".renaming", "expected an array of pairs");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!r[i].is_array() || r[i].size() != 2 || !r[i][0].is_string() || !r[i][1].is_string())
                schema(path + ".renaming[" + std::to_string(i) + "]", "expected a pair of names");
            p.renaming.emplace_back(r[i][0].get<std::string>(), r[i][1].get<std::string>());
        }
    }
    if (j.contains("eigen")) p.eigen = str(j, "eigen", path);
    if (j.contains("bound")) p.bound = str(j, "bound", path);
    if (j.contains("binder1")) p.binder1 = str(j, "binder1", path);
    if (j.contains("binder2")) p.binder2 = str(j, "binder2", path);
    if (j.contains("bare")) {
        if (!j.at("bare").is_boolean()) schema(path + ".bare", "expected a boolean");
        p.bare = j.at("bare").get<bool>();
    }

    std::size_t want = 0;
    switch (rule) {
    case Rule::Ax: want = 0; break;
    case Rule::ImpE: want = 2; break;
    case Rule::WithI: want = p.bare ? 2 : 4; break;
    default: want = 1;
    }
    if (ps.size() != want)
        schema(path + ".premises", std::string(to_string(rule)) + " expects " + std::to_string(want) + " premises");
    auto needs = [&](bool ok, const char* field) {
        if (!ok) schema(path, std::string("missing field \"") + field + "\"");
    };
    switch (rule) {
    case Rule::Ax: needs(!p.var.empty(), "var"); needs(p.type != nullptr, "type"); break;
    case Rule::ImpIl:
    case Rule::ImpIe: needs(!p.var.empty(), "var"); break;
    case Rule::M: needs(!p.var.empty(), "var"); needs(p.type != nullptr, "type"); break;
    case Rule::ForallI: needs(!p.eigen.empty(), "eigen"); break;
    case Rule::ForallE: needs(p.type != nullptr, "type"); break;
    case Rule::WithI:
        if (!p.bare) {
            needs(!p.binder1.empty(), "binder1");
            needs(!p.binder2.empty(), "binder2");
        }
        break;
    default: break;
    }

    if (j.contains("conclusion")) {
        const auto& c = j.at("conclusion");
        const auto cp = path + ".conclusion";
        Judgment jd;
        const auto& ctx = need(c, "context", cp);
        if (!ctx.is_object()) schema(cp + ".context", "expected an object");
        for (auto it = ctx.begin(); it != ctx.end(); ++it) jd.context[it.key()] = type_from(it.value(), cp + ".context." + it.key());
        jd.subject = term_from(need(c, "subject", cp), cp + ".subject");
        jd.type = type_from(need(c, "type", cp), cp + ".type");
        return make_raw(rule, p, ps, jd);
    }
    try {
        switch (rule) {
        case Rule::Ax: return make_ax(p.var, p.type);
        case Rule::ImpIl: return make_imp_il(ps[0], p.var);
        case Rule::ImpIe: return make_imp_ie(ps[0], p.var);
        case Rule::ImpE: return make_imp_e(ps[0], ps[1]);
        case Rule::WithI: return p.bare ? psta::make_pair(ps[0], ps[1]) : make_with_i(ps[0], ps[1], ps[2], ps[3], p.binder1, p.binder2);
        case Rule::WithE: return make_with_e(ps[0]);
        case Rule::Sp: return make_sp(ps[0], p.renaming);
        case Rule::M: return make_m(ps[0], p.var, p.merged, p.type);
        case Rule::ForallI: return make_forall_i(ps[0], p.eigen, p.bound);
        case Rule::ForallE: return make_forall_e(ps[0], p.type);
        }
    } catch (const CheckError& e) {
        throw CheckError(e.code(), path, std::string(to_string(rule)) + ": " + std::string(e.what()).substr(2));
    }
    schema(path + ".rule", "unsupported rule");
}

} // namespace

std::string derivation_to_json(const Derivation& d, int indent) { return node_json(d).dump(indent); }

Derivation parse_derivation(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("schema-error", std::string("$: invalid JSON: ") + e.what());
    }
    auto d = node_from(j, "$");
    check_derivation(d);
    return d;
}

std::string format_distribution(const SurfaceDistribution& d, int indent) {
    struct Row {
        std::string term;
        Rational prob;
    };
    std::vector<Row> rows;
    for (const auto& [k, e] : d.entries()) rows.push_back({print_term(e.term), e.prob});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.term < b.term;
    });
    json out = json::array();
    for (const auto& r : rows) out.push_back({{"term", r.term}, {"prob", rational_string(r.prob)}});
    return out.dump(indent);
}

std::string error_json(const std::string& code, const std::string& message) {
    return json{{"error", {{"code", code}, {"message", message}}}}.dump();
}

} // namespace psta
