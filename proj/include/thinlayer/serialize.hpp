#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "thinlayer/constants.hpp"
#include "thinlayer/convergence.hpp"
#include "thinlayer/layer.hpp"
#include "thinlayer/potentials.hpp"
#include "thinlayer/radial.hpp"
#include "thinlayer/two_electron.hpp"

// Artifact emission. Every number is printed with 17 significant digits so
// a parsed-back double is bit-identical, and object keys keep their
// insertion order, so identical runs produce identical bytes.

namespace thinlayer {

class Json {
  public:
    Json() = default; // null
    Json(bool b);
    Json(int v);
    Json(long long v);
    Json(unsigned long long v);
    Json(double v);
    Json(const char* s);
    Json(std::string s);

    static Json object();
    static Json array();

    // object field, insertion-ordered; replaces an existing key in place
    Json& set(const std::string& key, Json v);
    // array element
    Json& push(Json v);

    // pretty text with the given indent, trailing newline included
    std::string dump(int indent = 2) const;
    // compact text with object keys sorted recursively; hashing input
    std::string canonical() const;

  private:
    enum class Type { null, boolean, int64, uint64, f64, string, array, object };
    Type type_ = Type::null;
    bool bool_ = false;
    long long int_ = 0;
    unsigned long long uint_ = 0;
    double num_ = 0.0;
    std::string str_;
    std::vector<Json> arr_;
    std::vector<std::pair<std::string, Json>> obj_;

    void write(std::string& out, int indent, int depth, bool sorted) const;
};

// 17-significant-digit text for a double; "null" for non-finite values in
// JSON context, "nan"/"inf" in CSV context
std::string double17(double v);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex16(std::uint64_t v);

const char* kind_name(PotentialKind kind);

Json to_json(const ConstantSet& cs);
Json to_json(const ThresholdSet& ts);
Json to_json(const TabulatedPotential& pot);
Json to_json(const EigenResult& res);
Json to_json(const ConvergenceReport& rep);
Json to_json(const FeshbachReport& rep);
Json to_json(const CIResult& res);
Json to_json(const LocalizeResult& res);

std::string to_csv(const TabulatedPotential& pot);
std::string to_csv(const EigenResult& res);
std::string to_csv(const ConvergenceReport& rep);
std::string to_csv(const std::vector<double>& levels); // spectrum2d rows

// coordinate (row, col, value) text for the symmetric tridiagonal operator
std::string coord_text(const RadialOperator& op);

} // namespace thinlayer
