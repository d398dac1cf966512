#include "refed/params.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace refed {

namespace {

constexpr char kMagic[4] = {'R', 'F', 'P', 'S'};

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::vector<unsigned char>& in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw std::runtime_error("ParameterSet: truncated container");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[pos++]) << (8 * i);
    return v;
}

void put_f64(std::vector<unsigned char>& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

double get_f64(const std::vector<unsigned char>& in, std::size_t& pos) {
    std::uint64_t bits = get_u64(in, pos);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void ParameterSet::set(const std::string& name, Tensor t) { entries_[name] = std::move(t); }

bool ParameterSet::has(const std::string& name) const { return entries_.count(name) > 0; }

const Tensor& ParameterSet::get(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::invalid_argument("ParameterSet: no entry named " + name);
    return it->second;
}

Tensor& ParameterSet::get(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::invalid_argument("ParameterSet: no entry named " + name);
    return it->second;
}

std::size_t ParameterSet::total_size() const {
    std::size_t n = 0;
    for (const auto& [k, t] : entries_) n += t.size();
    return n;
}

std::vector<std::string> ParameterSet::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [k, t] : entries_) out.push_back(k);
    return out;
}

std::vector<double> ParameterSet::flatten() const {
    std::vector<double> out;
    out.reserve(total_size());
    for (const auto& [k, t] : entries_) out.insert(out.end(), t.values.begin(), t.values.end());
    return out;
}

void ParameterSet::unflatten(const std::vector<double>& flat) {
    if (flat.size() != total_size())
        throw std::invalid_argument("ParameterSet::unflatten: length " + std::to_string(flat.size()) +
                                    " != " + std::to_string(total_size()));
    std::size_t pos = 0;
    for (auto& [k, t] : entries_) {
        std::copy(flat.begin() + pos, flat.begin() + pos + t.size(), t.values.begin());
        pos += t.size();
    }
}

ParameterSet ParameterSet::subset(const std::string& prefix) const {
    ParameterSet out;
    for (const auto& [k, t] : entries_)
        if (k.rfind(prefix, 0) == 0) out.set(k, t);
    return out;
}

void ParameterSet::assign_from(const ParameterSet& other) {
    for (const auto& [k, t] : other) {
        auto it = entries_.find(k);
        if (it == entries_.end()) continue;
        if (!it->second.same_shape(t))
            throw std::invalid_argument("ParameterSet::assign_from: shape mismatch at " + k);
        it->second = t;
    }
}

ParameterSet ParameterSet::sgd_step(const ParameterSet& params, const ParameterSet& grads, double lr) {
    ParameterSet out = params;
    for (auto& [k, t] : out.entries_) {
        const Tensor& g = grads.get(k);
        if (!t.same_shape(g))
            throw std::invalid_argument("sgd_step: shape mismatch at " + k + ": " + t.shape_str() +
                                        " vs " + g.shape_str());
        for (std::size_t i = 0; i < t.size(); ++i) t.values[i] -= lr * g.values[i];
    }
    return out;
}

std::vector<unsigned char> ParameterSet::serialize() const {
    std::vector<unsigned char> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u64(out, entries_.size());
    for (const auto& [name, t] : entries_) {
        put_u64(out, name.size());
        out.insert(out.end(), name.begin(), name.end());
        put_u64(out, t.shape.size());
        for (auto d : t.shape) put_u64(out, d);
        for (double v : t.values) put_f64(out, v);
    }
    return out;
}

ParameterSet ParameterSet::deserialize(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw std::runtime_error("ParameterSet: bad container magic");
    std::size_t pos = 4;
    std::uint64_t count = get_u64(bytes, pos);
    ParameterSet out;
    for (std::uint64_t e = 0; e < count; ++e) {
        std::uint64_t nlen = get_u64(bytes, pos);
        if (pos + nlen > bytes.size()) throw std::runtime_error("ParameterSet: truncated name");
        std::string name(bytes.begin() + pos, bytes.begin() + pos + nlen);
        pos += nlen;
        std::uint64_t rank = get_u64(bytes, pos);
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) d = static_cast<std::size_t>(get_u64(bytes, pos));
        Tensor t(shape);
        for (auto& v : t.values) v = get_f64(bytes, pos);
        out.set(name, std::move(t));
    }
    return out;
}

void ParameterSet::save(const std::string& path) const {
    auto bytes = serialize();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ParameterSet: cannot open " + path + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ParameterSet ParameterSet::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("ParameterSet: cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace refed
