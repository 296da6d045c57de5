#include "psta/reduction.hpp"

#include "psta/error.hpp"

namespace psta {

const char* to_string(RedexKind k) {
    switch (k) {
    case RedexKind::Beta: return "beta";
    case RedexKind::BangBeta: return "bang-beta";
    case RedexKind::Proj: return "proj";
    case RedexKind::Copy: return "copy";
    }
    return "?";
}

bool redex_at_root(const Term& t, RedexKind& kind) {
    switch (t->kind) {
    case TermKind::App: {
        const auto& f = t->kids[0];
        if (f->kind == TermKind::Lam) {
            kind = RedexKind::Beta;
            return true;
        }
        if (f->kind == TermKind::BangLam && t->kids[1]->kind == TermKind::Bang) {
            kind = RedexKind::BangBeta;
            return true;
        }
        return false;
    }
    case TermKind::Proj:
        if (t->kids[0]->kind == TermKind::Pair) {
            kind = RedexKind::Proj;
            return true;
        }
        return false;
    case TermKind::Copy:
        if (is_value(t->kids[0]) && is_value(t->kids[1])) {
            kind = RedexKind::Copy;
            return true;
        }
        return false;
    default: return false;
    }
}

namespace {

// Surface positions: everything except ! bodies and the copy bound-value slot.
bool surface_child(const TermNode& t, std::size_t i) {
    if (t.kind == TermKind::Bang) return false;
    if (t.kind == TermKind::Copy && i == 0) return false;
    return true;
}

void collect(const Term& t, std::vector<int>& path, std::vector<RedexSite>& out) {
    RedexKind k;
    if (redex_at_root(t, k)) out.push_back({path, k});
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        if (!surface_child(*t, i)) continue;
        path.push_back(static_cast<int>(i));
        collect(t->kids[i], path, out);
        path.pop_back();
    }
}

bool first(const Term& t, std::vector<int>& path, RedexSite& out) {
    RedexKind k;
    if (redex_at_root(t, k)) {
        out = {path, k};
        return true;
    }
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        if (!surface_child(*t, i)) continue;
        path.push_back(static_cast<int>(i));
        if (first(t->kids[i], path, out)) return true;
        path.pop_back();
    }
    return false;
}

bool any_redex(const Term& t) {
    RedexKind k;
    if (redex_at_root(t, k)) return true;
    for (std::size_t i = 0; i < t->kids.size(); ++i)
        if (surface_child(*t, i) && any_redex(t->kids[i])) return true;
    return false;
}

} // namespace

std::vector<RedexSite> find_redexes(const Term& t) {
    std::vector<RedexSite> out;
    std::vector<int> path;
    collect(t, path, out);
    return out;
}

std::optional<RedexSite> first_redex(const Term& t) {
    std::vector<int> path;
    RedexSite out;
    if (first(t, path, out)) return out;
    return std::nullopt;
}

bool is_snf(const Term& t) { return !any_redex(t); }

StepResult step(const Term& t, const RedexSite& site) {
    Term r;
    try {
        r = subterm_at(t, site.path);
    } catch (const Error&) {
        throw Error("invalid-site", "redex site does not address a subterm");
    }
    // the path itself must be a surface path
    {
        Term cur = t;
        for (int i : site.path) {
            if (!surface_child(*cur, static_cast<std::size_t>(i)))
                throw Error("invalid-site", "redex site is not in a surface context");
            cur = cur->kids[i];
        }
    }
    RedexKind k;
    if (!redex_at_root(r, k)) {
        if (site.kind == RedexKind::Copy && r->kind == TermKind::Copy)
            throw Error("copy-not-ready", "copy scrutinee or bound term is not yet a value");
        throw Error("invalid-site", "no redex at the given site");
    }
    if (k != site.kind) throw Error("invalid-site", "redex kind does not match the site");

    StepResult out;
    switch (k) {
    case RedexKind::Beta: {
        const auto& f = r->kids[0];
        out.successors.push_back(replace_at(t, site.path, substitute(f->kids[0], f->name, r->kids[1])));
        break;
    }
    case RedexKind::BangBeta: {
        const auto& f = r->kids[0];
        out.successors.push_back(replace_at(t, site.path, surface_substitute(f->kids[0], f->name, r->kids[1])));
        break;
    }
    case RedexKind::Proj: {
        const auto& p = r->kids[0];
        out.successors.push_back(replace_at(t, site.path, p->kids[0]));
        out.successors.push_back(replace_at(t, site.path, p->kids[1]));
        break;
    }
    case RedexKind::Copy: {
        const auto& v = r->kids[1];
        Term res = pair(substitute(r->kids[2], r->name, v), substitute(r->kids[3], r->name2, v));
        out.successors.push_back(replace_at(t, site.path, res));
        break;
    }
    }
    return out;
}

} // namespace psta
