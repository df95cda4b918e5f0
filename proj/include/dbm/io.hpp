#pragma once

#include <fstream>
#include <functional>
#include <memory>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dbm/parametrize.hpp"

namespace dbm {

/// Model files use sorted keys so that serialization is canonical.
using model_json = nlohmann::json;

inline Mode parse_mode(const std::string& s) {
    if (s == "exact") return Mode::exact;
    if (s == "float") return Mode::floating;
    throw PreconditionError("unknown mode \"" + s + "\" (expected exact|float)");
}

class ModelError : public DbmError {
public:
    ModelError(const std::string& source, std::size_t line, std::size_t column, const std::string& msg)
        : DbmError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_, column_;
};

namespace detail {

/// Byte offset of every value in valid JSON text, keyed by JSON pointer.
class PositionIndex {
public:
    explicit PositionIndex(const std::string& text) : t_(text) {
        std::size_t i = 0;
        value(i, "");
    }
    std::size_t offset(const std::string& pointer) const {
        auto it = pos_.find(pointer);
        return it == pos_.end() ? 0 : it->second;
    }

private:
    const std::string& t_;
    std::map<std::string, std::size_t> pos_;

    void ws(std::size_t& i) const {
        while (i < t_.size() && std::isspace(static_cast<unsigned char>(t_[i]))) ++i;
    }
    std::string str(std::size_t& i) const {
        std::string out;
        ++i;
        while (i < t_.size() && t_[i] != '"') {
            if (t_[i] == '\\') ++i;
            out += t_[i++];
        }
        ++i;
        return out;
    }
    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out += c;
        }
        return out;
    }
    void value(std::size_t& i, const std::string& ptr) {
        ws(i);
        pos_[ptr] = i;
        if (i >= t_.size()) return;
        const char c = t_[i];
        if (c == '{') {
            ++i;
            ws(i);
            if (t_[i] == '}') {
                ++i;
                return;
            }
            while (true) {
                ws(i);
                const std::string key = str(i);
                ws(i);
                ++i;  // ':'
                value(i, ptr + "/" + escape(key));
                ws(i);
                if (t_[i++] == '}') return;
            }
        } else if (c == '[') {
            ++i;
            ws(i);
            if (t_[i] == ']') {
                ++i;
                return;
            }
            for (std::size_t k = 0;; ++k) {
                value(i, ptr + "/" + std::to_string(k));
                ws(i);
                if (t_[i++] == ']') return;
            }
        } else if (c == '"') {
            str(i);
        } else {
            while (i < t_.size() && t_[i] != ',' && t_[i] != '}' && t_[i] != ']' && !std::isspace(static_cast<unsigned char>(t_[i]))) ++i;
        }
    }
};

}  // namespace detail

/// Decodes JSON values into K, reporting errors at the JSON pointer of the offending value.
template <CoefficientField K>
class Decoder {
public:
    using Fail = std::function<void(const std::string& ptr, const std::string& msg)>;
    explicit Decoder(Fail fail) : fail_(std::move(fail)) {}

    K scalar(const model_json& j, const std::string& p) const {
        if (j.is_array()) {
            if (j.size() != 2) fail_(p, "complex scalar must be [re, im]");
            const K re = real(j[0], p + "/0"), im = real(j[1], p + "/1");
            return re + im * FieldTraits<K>::imag_unit();
        }
        return real(j, p);
    }

    Poly<K> poly(const model_json& j, const std::string& p) const {
        if (!j.is_array()) fail_(p, "polynomial must be an ascending coefficient list");
        std::vector<K> c;
        for (std::size_t k = 0; k < j.size(); ++k) c.push_back(scalar(j[k], p + "/" + std::to_string(k)));
        return Poly<K>(std::move(c));
    }

    Rat<K> entry(const model_json& j, const std::string& p) const {
        if (!j.is_object()) return Rat<K>(scalar(j, p));
        keys(j, p, {"num", "den"}, {"num"});
        const Poly<K> num = poly(j["num"], p + "/num");
        Poly<K> den(FieldTraits<K>::from_int(1));
        if (j.contains("den")) den = poly(j["den"], p + "/den");
        if (den.is_zero()) fail_(p + "/den", "zero denominator");
        return Rat<K>(num, den);
    }

    RatMat<K> matrix(const model_json& j, const std::string& p) const {
        if (!j.is_object()) fail_(p, "rational matrix must be an object with rows, cols, entries");
        keys(j, p, {"type", "rows", "cols", "entries"}, {"rows", "cols", "entries"});
        const std::size_t r = size(j["rows"], p + "/rows"), c = size(j["cols"], p + "/cols");
        const auto& e = j["entries"];
        if (!e.is_array() || e.size() != r) fail_(p + "/entries", "expected " + std::to_string(r) + " rows");
        RatMat<K> out(r, c);
        for (std::size_t a = 0; a < r; ++a) {
            const std::string pr = p + "/entries/" + std::to_string(a);
            if (!e[a].is_array() || e[a].size() != c) fail_(pr, "expected " + std::to_string(c) + " columns");
            for (std::size_t b = 0; b < c; ++b) out(a, b) = entry(e[a][b], pr + "/" + std::to_string(b));
        }
        return out;
    }

    Mat<K> constant(const model_json& j, const std::string& p) const {
        if (!j.is_array() || j.empty()) fail_(p, "constant matrix must be a non-empty list of rows");
        const std::size_t r = j.size(), c = j[0].is_array() ? j[0].size() : 0;
        Mat<K> out(r, c);
        for (std::size_t a = 0; a < r; ++a) {
            const std::string pr = p + "/" + std::to_string(a);
            if (!j[a].is_array() || j[a].size() != c) fail_(pr, "expected " + std::to_string(c) + " columns");
            for (std::size_t b = 0; b < c; ++b) out(a, b) = scalar(j[a][b], pr + "/" + std::to_string(b));
        }
        return out;
    }

    void keys(const model_json& j, const std::string& p, std::initializer_list<const char*> allowed,
              std::initializer_list<const char*> required) const {
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!ok.count(it.key())) fail_(p + "/" + it.key(), "unknown field \"" + it.key() + "\"");
        for (const char* k : required)
            if (!j.contains(k)) fail_(p, std::string("missing field \"") + k + "\"");
    }

    std::size_t size(const model_json& j, const std::string& p) const {
        if (!j.is_number_unsigned() || j.get<std::size_t>() == 0) fail_(p, "expected a positive integer");
        return j.get<std::size_t>();
    }

private:
    Fail fail_;

    K real(const model_json& j, const std::string& p) const {
        if (j.is_string()) {
            try {
                const mpq_class q = GaussRational::parse_rational(j.get<std::string>());
                if constexpr (is_exact_v<K>) return GaussRational(q);
                else return cplx(q.get_d(), 0.0);
            } catch (const std::invalid_argument& e) {
                const std::string m = e.what();
                fail_(p, m.find("zero denominator") != std::string::npos ? "zero denominator" : m);
            }
        }
        if (j.is_number_integer()) {
            if constexpr (is_exact_v<K>) return GaussRational(mpq_class(j.dump()));
            else return cplx(j.get<double>(), 0.0);
        }
        if (j.is_number_float()) {
            if constexpr (is_exact_v<K>) fail_(p, "non-integer number in exact mode; use a \"p/q\" string");
            else return cplx(j.get<double>(), 0.0);
        }
        fail_(p, "expected a number or a \"p/q\" string");
        return K{};
    }
};

/// Encodes values canonically: exact reals as "p/q" strings, complex scalars as [re, im].
template <CoefficientField K>
struct Encoder {
    static model_json scalar(const K& x) {
        if constexpr (is_exact_v<K>) {
            const auto re = model_json(GaussRational::rational_string(x.real()));
            if (x.is_real()) return re;
            return model_json::array({re, GaussRational::rational_string(x.imag())});
        } else {
            if (x.imag() == 0.0) return x.real();
            return model_json::array({x.real(), x.imag()});
        }
    }
    static model_json poly(const Poly<K>& p) {
        model_json a = model_json::array();
        for (const auto& c : p.coeffs()) a.push_back(scalar(c));
        if (a.empty()) a.push_back(scalar(K{}));
        return a;
    }
    static model_json entry(const Rat<K>& r) { return {{"num", poly(r.num())}, {"den", poly(r.den())}}; }
    static model_json matrix(const RatMat<K>& m) {
        model_json e = model_json::array();
        for (std::size_t a = 0; a < m.rows(); ++a) {
            model_json row = model_json::array();
            for (std::size_t b = 0; b < m.cols(); ++b) row.push_back(entry(m(a, b)));
            e.push_back(row);
        }
        return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", e}};
    }
    static model_json constant(const Mat<K>& m) {
        model_json e = model_json::array();
        for (std::size_t a = 0; a < m.rows(); ++a) {
            model_json row = model_json::array();
            for (std::size_t b = 0; b < m.cols(); ++b) row.push_back(scalar(m(a, b)));
            e.push_back(row);
        }
        return e;
    }
};

/// Named objects: rational_matrix, constant_matrix, pair, db_matrix, herglotz_params, k0_operator.
class ModelFile {
public:
    static constexpr const char* kVersion = "dbm-model/1";

    Mode mode = Mode::exact;
    model_json objects = model_json::object();

    static ModelFile parse(const std::string& text, const std::string& source = "<model>") {
        ModelFile m;
        m.source_ = source;
        m.text_ = text;
        model_json root;
        try {
            root = model_json::parse(text);
        } catch (const model_json::parse_error& e) {
            const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
            std::string msg = e.what();
            if (auto k = msg.find("syntax error"); k != std::string::npos) msg = msg.substr(k);
            throw ModelError(source, line, col, msg);
        }
        m.index_ = std::make_shared<detail::PositionIndex>(m.text_);
        auto fail = m.failer();
        Decoder<GaussRational> d(fail);
        if (!root.is_object()) fail("", "model file must be an object");
        d.keys(root, "", {"version", "mode", "objects"}, {"version", "mode", "objects"});
        if (root["version"] != kVersion) fail("/version", std::string("unsupported version (expected \"") + kVersion + "\")");
        try {
            m.mode = parse_mode(root["mode"].is_string() ? root["mode"].get<std::string>() : "");
        } catch (const PreconditionError& e) {
            fail("/mode", e.what());
        }
        if (!root["objects"].is_object()) fail("/objects", "objects must be a map from names to objects");
        m.objects = root["objects"];
        for (auto it = m.objects.begin(); it != m.objects.end(); ++it) {
            if (m.mode == Mode::exact) m.validate<GaussRational>(it.key());
            else m.validate<cplx>(it.key());
        }
        return m;
    }

    static ModelFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw PreconditionError("cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    std::string serialize() const {
        model_json root;
        root["version"] = kVersion;
        root["mode"] = to_string(mode);
        root["objects"] = objects;
        return root.dump(2) + "\n";
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw PreconditionError("cannot write " + path);
        out << serialize();
    }

    bool has(const std::string& name) const { return objects.contains(name); }

    std::string type_of(const std::string& name) const {
        if (!has(name)) throw PreconditionError("unknown object \"" + name + "\"");
        return objects[name]["type"].get<std::string>();
    }

    template <CoefficientField K>
    RatMat<K> matrix(const std::string& name) const {
        const auto t = type_of(name);
        const auto& o = objects[name];
        if (t == "rational_matrix") return decoder<K>().matrix(o, ptr(name));
        if (t == "constant_matrix") return RatMat<K>(decoder<K>().constant(o["entries"], ptr(name) + "/entries"));
        if (t == "db_matrix") return decoder<K>().matrix(o["matrix"], ptr(name) + "/matrix");
        throw PreconditionError("type mismatch: \"" + name + "\" is a " + t + ", expected a matrix");
    }

    template <CoefficientField K>
    Mat<K> constant(const std::string& name) const {
        const RatMat<K> m = matrix<K>(name);
        if (!m.is_constant()) throw PreconditionError("type mismatch: \"" + name + "\" is not constant");
        return m.constant_matrix();
    }

    template <CoefficientField K>
    std::pair<RatMat<K>, std::size_t> db_matrix(const std::string& name) const {
        const auto t = type_of(name);
        if (t == "db_matrix") return {matrix<K>(name), objects[name]["n"].get<std::size_t>()};
        if (t == "rational_matrix") {
            const RatMat<K> m = matrix<K>(name);
            if (!m.square() || m.rows() % 2) throw PreconditionError("size mismatch: \"" + name + "\" is not 2n x 2n");
            return {m, m.rows() / 2};
        }
        throw PreconditionError("type mismatch: \"" + name + "\" is a " + t + ", expected db_matrix");
    }

    template <CoefficientField K>
    DeBrangesPair<K> pair(const std::string& name) const {
        expect(name, "pair");
        const auto& o = objects[name];
        auto d = decoder<K>();
        return {d.matrix(o["E_minus"], ptr(name) + "/E_minus"), d.matrix(o["E_plus"], ptr(name) + "/E_plus")};
    }

    template <CoefficientField K>
    HerglotzParams<K> herglotz(const std::string& name) const {
        expect(name, "herglotz_params");
        const auto& o = objects[name];
        auto d = decoder<K>();
        const std::string p = ptr(name);
        HerglotzParams<K> h;
        h.P = d.constant(o["P"], p + "/P");
        h.Q = d.constant(o["Q"], p + "/Q");
        h.density = o.contains("density") ? d.matrix(o["density"], p + "/density") : RatMat<K>(h.P.rows(), h.P.rows());
        if (o.contains("point_masses"))
            for (std::size_t k = 0; k < o["point_masses"].size(); ++k) {
                const auto& pm = o["point_masses"][k];
                const std::string pp = p + "/point_masses/" + std::to_string(k);
                d.keys(pm, pp, {"point", "weight"}, {"point", "weight"});
                h.point_masses.push_back({d.scalar(pm["point"], pp + "/point"), d.constant(pm["weight"], pp + "/weight")});
            }
        return h;
    }

    template <CoefficientField K>
    K0Operator<K> k0(const std::string& name) const {
        expect(name, "k0_operator");
        const auto& o = objects[name];
        auto d = decoder<K>();
        return {d.constant(o["T"], ptr(name) + "/T"), d.constant(o["U"], ptr(name) + "/U")};
    }

    template <CoefficientField K>
    void put_matrix(const std::string& name, const RatMat<K>& m) {
        objects[name] = Encoder<K>::matrix(m);
        objects[name]["type"] = "rational_matrix";
    }
    template <CoefficientField K>
    void put_constant(const std::string& name, const Mat<K>& m) {
        objects[name] = {{"type", "constant_matrix"}, {"entries", Encoder<K>::constant(m)}};
    }
    template <CoefficientField K>
    void put_db_matrix(const std::string& name, const RatMat<K>& m, std::size_t n) {
        objects[name] = {{"type", "db_matrix"}, {"n", n}, {"matrix", Encoder<K>::matrix(m)}};
    }
    template <CoefficientField K>
    void put_pair(const std::string& name, const DeBrangesPair<K>& p) {
        objects[name] = {{"type", "pair"}, {"E_minus", Encoder<K>::matrix(p.E_minus)}, {"E_plus", Encoder<K>::matrix(p.E_plus)}};
    }
    template <CoefficientField K>
    void put_herglotz(const std::string& name, const HerglotzParams<K>& h) {
        model_json pm = model_json::array();
        for (const auto& m : h.point_masses) pm.push_back({{"point", Encoder<K>::scalar(m.point)}, {"weight", Encoder<K>::constant(m.weight)}});
        objects[name] = {{"type", "herglotz_params"}, {"P", Encoder<K>::constant(h.P)}, {"Q", Encoder<K>::constant(h.Q)},
                         {"density", Encoder<K>::matrix(h.density)}, {"point_masses", pm}};
    }
    template <CoefficientField K>
    void put_k0(const std::string& name, const K0Operator<K>& op) {
        objects[name] = {{"type", "k0_operator"}, {"T", Encoder<K>::constant(op.T)}, {"U", Encoder<K>::constant(op.U)}};
    }

private:
    std::string source_ = "<model>";
    std::string text_;
    std::shared_ptr<detail::PositionIndex> index_;

    static std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t off) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k < off && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    static std::string ptr(const std::string& name) { return "/objects/" + name; }

    typename Decoder<GaussRational>::Fail failer() const {
        return [this](const std::string& p, const std::string& msg) {
            std::size_t off = 0;
            if (index_) {
                // nearest existing ancestor
                std::string q = p;
                while (true) {
                    off = index_->offset(q);
                    if (off != 0 || q.empty()) break;
                    q = q.substr(0, q.rfind('/'));
                }
            }
            const auto [line, col] = line_col(text_, off);
            throw ModelError(source_, line, col, msg + (p.empty() ? "" : " (at " + p + ")"));
        };
    }

    template <CoefficientField K>
    Decoder<K> decoder() const {
        return Decoder<K>(failer());
    }

    void expect(const std::string& name, const std::string& type) const {
        const auto t = type_of(name);
        if (t != type) throw PreconditionError("type mismatch: \"" + name + "\" is a " + t + ", expected " + type);
    }

    template <CoefficientField K>
    void validate(const std::string& name) const {
        const auto& o = objects[name];
        const std::string p = ptr(name);
        auto d = decoder<K>();
        if (!o.is_object() || !o.contains("type") || !o["type"].is_string()) d.keys(model_json::object(), p, {}, {"type"});
        const std::string t = o["type"].get<std::string>();
        if (t == "rational_matrix") {
            d.matrix(o, p);
        } else if (t == "constant_matrix") {
            d.keys(o, p, {"type", "entries"}, {"entries"});
            d.constant(o["entries"], p + "/entries");
        } else if (t == "db_matrix") {
            d.keys(o, p, {"type", "n", "matrix"}, {"n", "matrix"});
            const std::size_t n = d.size(o["n"], p + "/n");
            const RatMat<K> m = d.matrix(o["matrix"], p + "/matrix");
            if (m.rows() != 2 * n || m.cols() != 2 * n) failer()(p + "/matrix", "size mismatch: expected 2n x 2n");
        } else if (t == "pair") {
            d.keys(o, p, {"type", "E_minus", "E_plus"}, {"E_minus", "E_plus"});
            const RatMat<K> a = d.matrix(o["E_minus"], p + "/E_minus"), b = d.matrix(o["E_plus"], p + "/E_plus");
            if (!a.square() || a.rows() != b.rows() || !b.square()) failer()(p, "E_minus and E_plus must be n x n");
        } else if (t == "herglotz_params") {
            d.keys(o, p, {"type", "P", "Q", "density", "point_masses"}, {"P", "Q"});
            herglotz<K>(name);
        } else if (t == "k0_operator") {
            d.keys(o, p, {"type", "T", "U"}, {"T", "U"});
            k0<K>(name);
        } else {
            failer()(p + "/type", "unknown object type \"" + t + "\"");
        }
    }
};

}  // namespace dbm
