#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "multicrop/consistency.hpp"
#include "multicrop/solver.hpp"
#include "multicrop/synth.hpp"
#include "multicrop/types.hpp"

namespace multicrop {

using json = nlohmann::json;

void to_json(json& j, const BBox& b);
void from_json(const json& j, BBox& b);

void to_json(json& j, const LocalCamera& c);
void from_json(const json& j, LocalCamera& c);

void to_json(json& j, const FullCamera& c);
void from_json(const json& j, FullCamera& c);

void to_json(json& j, const Joint3D& p);
void from_json(const json& j, Joint3D& p);

void to_json(json& j, const Joint2D& p);
void from_json(const json& j, Joint2D& p);

void to_json(json& j, const NoiseSigma& s);
void from_json(const json& j, NoiseSigma& s);

void to_json(json& j, const Scene& s);
void from_json(const json& j, Scene& s);

void to_json(json& j, const ConsistencyWeights& w);
void from_json(const json& j, ConsistencyWeights& w);

void to_json(json& j, const SolveConfig& c);
void from_json(const json& j, SolveConfig& c);

void to_json(json& j, const SolveReport& r);

/// Parse with schema errors rewritten as ValidationError carrying the
/// offending field.
json parse_json(const std::string& text);

template <typename T>
T from_json_checked(const json& j, const std::string& what) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(what + ": " + e.what());
    }
}

}  // namespace multicrop
