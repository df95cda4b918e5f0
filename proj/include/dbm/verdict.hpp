#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dbm/field.hpp"

namespace dbm {

using json = nlohmann::ordered_json;

/// Diagnostic attached to a verdict: what failed, where, and by how much.
struct Witness {
    std::string kind;    // "pole", "sample", "min_eig", "residual", "error", "note"
    std::string detail;
    std::optional<cplx> point;
    std::optional<double> value;

    json to_json() const {
        json j;
        j["kind"] = kind;
        j["detail"] = detail;
        if (point) j["point"] = {point->real(), point->imag()};
        if (value) j["value"] = *value;
        return j;
    }
};

struct Verdict {
    std::string name;
    bool member = true;
    std::vector<Witness> witnesses;
    std::vector<std::string> notes;
    std::vector<Verdict> items;

    Verdict() = default;
    explicit Verdict(std::string n) : name(std::move(n)) {}

    explicit operator bool() const { return member; }

    Verdict& fail(Witness w) {
        member = false;
        witnesses.push_back(std::move(w));
        return *this;
    }
    Verdict& fail(std::string kind, std::string detail, std::optional<cplx> point = std::nullopt,
                  std::optional<double> value = std::nullopt) {
        return fail(Witness{std::move(kind), std::move(detail), point, value});
    }
    Verdict& note(std::string s) {
        notes.push_back(std::move(s));
        return *this;
    }
    /// Adds a sub-verdict; a failing item fails the parent.
    Verdict& add(Verdict v, bool required = true) {
        if (required && !v.member) {
            member = false;
            witnesses.push_back({"item", v.name + " failed", std::nullopt, std::nullopt});
        }
        items.push_back(std::move(v));
        return *this;
    }
    const Verdict* find(const std::string& n) const {
        for (const auto& v : items)
            if (v.name == n) return &v;
        return nullptr;
    }

    json to_json() const {
        json j;
        j["name"] = name;
        j["member"] = member;
        if (!witnesses.empty()) {
            j["witnesses"] = json::array();
            for (const auto& w : witnesses) j["witnesses"].push_back(w.to_json());
        }
        if (!notes.empty()) j["notes"] = notes;
        if (!items.empty()) {
            j["items"] = json::array();
            for (const auto& v : items) j["items"].push_back(v.to_json());
        }
        return j;
    }

    std::string to_text(int indent = 0) const {
        std::ostringstream os;
        const std::string pad(static_cast<std::size_t>(indent), ' ');
        os << pad << name << ": " << (member ? "yes" : "no") << "\n";
        for (const auto& w : witnesses) {
            os << pad << "  - " << w.kind << ": " << w.detail;
            if (w.point) os << " at " << w.point->real() << (w.point->imag() < 0 ? "-" : "+") << std::abs(w.point->imag()) << "i";
            if (w.value) os << " (" << *w.value << ")";
            os << "\n";
        }
        for (const auto& n : notes) os << pad << "  note: " << n << "\n";
        for (const auto& v : items) os << v.to_text(indent + 2);
        return os.str();
    }
};

}  // namespace dbm
