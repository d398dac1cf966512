#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "refed/tensor.hpp"

namespace refed {

/// Named map from layer name to tensor. Flattening order is the lexicographic
/// order of the names (std::map iteration order); this order is part of the
/// wire/checkpoint contract.
class ParameterSet {
public:
    void set(const std::string& name, Tensor t);
    bool has(const std::string& name) const;
    const Tensor& get(const std::string& name) const;
    Tensor& get(const std::string& name);

    std::size_t entry_count() const { return entries_.size(); }
    std::size_t total_size() const;
    std::vector<std::string> names() const;

    std::vector<double> flatten() const;
    /// Writes a conforming flat vector back into the existing shapes.
    void unflatten(const std::vector<double>& flat);

    /// Subset whose names start with `prefix`.
    ParameterSet subset(const std::string& prefix) const;
    /// Overwrites matching entries from `other` (shapes must agree).
    void assign_from(const ParameterSet& other);

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }

    /// p' = p - lr * g, elementwise over matching names.
    static ParameterSet sgd_step(const ParameterSet& params, const ParameterSet& grads, double lr);

    // Portable container: magic, entry count, then per entry name, shape and
    // little-endian IEEE-754 doubles. Used for checkpoints and wire payloads.
    void save(const std::string& path) const;
    static ParameterSet load(const std::string& path);
    std::vector<unsigned char> serialize() const;
    static ParameterSet deserialize(const std::vector<unsigned char>& bytes);

private:
    std::map<std::string, Tensor> entries_;
};

}  // namespace refed
