#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eclipse/error.h"

namespace eclipse::ad {

class Tape;

// Learning-rate group of an optimizable array.
enum class ParamGroup : uint8_t { Environment = 0, Material = 1, Occluder = 2 };

// All optimizable quantities live here as one flat 64-bit array, carved into
// named arrays tagged with their group. Slots are stable for the lifetime of
// the store, so gradients and optimizer state are plain parallel arrays.
class ParameterStore {
 public:
    struct ArrayInfo {
        std::string name;
        ParamGroup group;
        std::vector<int64_t> shape;
        size_t offset = 0;
        size_t count = 0;
    };

    size_t registerArray(const std::string& name, ParamGroup group,
                         std::vector<int64_t> shape);

    size_t size() const { return values_.size(); }
    const std::vector<ArrayInfo>& arrays() const { return arrays_; }
    const ArrayInfo& arrayInfo(size_t handle) const { return arrays_[handle]; }
    const ArrayInfo* findArray(const std::string& name) const;

    std::span<double> array(size_t handle) {
        const ArrayInfo& a = arrays_[handle];
        return {values_.data() + a.offset, a.count};
    }
    std::span<const double> array(size_t handle) const {
        const ArrayInfo& a = arrays_[handle];
        return {values_.data() + a.offset, a.count};
    }

    double value(size_t slot) const { return values_[slot]; }
    double& value(size_t slot) { return values_[slot]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    ParamGroup groupOf(size_t slot) const;

 private:
    std::vector<double> values_;
    std::vector<ArrayInfo> arrays_;
};

// Gradient of a scalar with respect to every slot of a ParameterStore.
using GradientMap = std::vector<double>;

namespace detail {
// Edge parents are node indices when >= 0; otherwise they address a parameter
// slot directly: slot = -(parent + 1).
constexpr int32_t encodeParam(size_t slot) { return -static_cast<int32_t>(slot) - 1; }
constexpr bool isParam(int32_t parent) { return parent < 0; }
constexpr size_t paramSlot(int32_t parent) { return static_cast<size_t>(-(parent + 1)); }
}  // namespace detail

enum class Op : uint8_t {
    Input, Param, Add, Sub, Mul, Div, Neg, Exp, Log, Sqrt, Sin, Cos,
    Sigmoid, Relu, MaxConst, Powi, Dot, Affine, Sum,
};

// Scalar-valued handle into a Tape. A Value without a node is a constant and
// contributes no gradient; detach() produces exactly that. Values also carry
// their numerical data so the forward result can be read without the tape.
class Value {
 public:
    Value() = default;
    Value(double v) : data_(v) {}  // NOLINT: implicit constant lift

    double data() const { return data_; }
    bool isConst() const { return node_ < 0 && pslot_ < 0; }
    bool isParamRef() const { return pslot_ >= 0; }
    Tape* tape() const { return tape_; }

 private:
    friend class Tape;
    Tape* tape_ = nullptr;
    int32_t node_ = -1;
    int32_t pslot_ = -1;
    double data_ = 0;
};

// Reverse-mode tape with precomputed local partials. Single-owner: one tape
// traces one expression at a time, several tapes may run concurrently on
// disjoint work as long as they share nothing but the (read-only) store.
class Tape {
 public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Drops all nodes, keeps capacity.
    void clear();
    size_t nodeCount() const { return nodes_.size(); }

    // Fresh differentiable input (test usage and free leaves).
    Value input(double v);

    // Reference to a parameter slot; gradients accumulate straight into the
    // GradientMap during backward.
    Value param(const ParameterStore& store, size_t slot);
    Value param(const ParameterStore& store, size_t arrayHandle, size_t index);

    // Fused inner product of parameter slots [base, base+n) with fixed
    // coefficients: one node, n edges.
    Value dotParams(const ParameterStore& store, size_t base,
                    std::span<const double> coeffs);

    // Same with scattered slots (bilinear texel gathers and friends).
    Value dotParamsIndexed(const ParameterStore& store, std::span<const size_t> slots,
                           std::span<const double> coeffs);

    // Fixed-coefficient combination of traced values: sum_i coeffs_i * xs_i.
    Value weightedSum(std::span<const Value> xs, std::span<const double> coeffs);

    // Fused affine combination  sum_i w_i * v_i + bias  where both the
    // weights w (parameters, starting at wBase) and the inputs v may carry
    // gradients. Pass biasSlot == npos for no bias.
    static constexpr size_t npos = static_cast<size_t>(-1);
    Value affineParams(const ParameterStore& store, size_t wBase,
                       std::span<const Value> inputs, size_t biasSlot);

    // Fused n-ary sum.
    Value sum(std::span<const Value> xs);

    // Reverse sweep from a scalar root. Parameter-edge contributions are added
    // into grads (which must have store.size() entries); node adjoints remain
    // readable via adjoint() until the next backward or clear.
    void backward(const Value& root, GradientMap* grads);

    // Adjoint of a traced value after backward. Constants have adjoint 0.
    double adjoint(const Value& v) const;

    // --- primitive ops (free-function style entry points below) ---
    Value add(const Value& a, const Value& b);
    Value sub(const Value& a, const Value& b);
    Value mul(const Value& a, const Value& b);
    Value div(const Value& a, const Value& b);
    Value neg(const Value& a);
    Value expOp(const Value& a);
    Value logOp(const Value& a);
    Value sqrtOp(const Value& a);
    Value sinOp(const Value& a);
    Value cosOp(const Value& a);
    Value sigmoidOp(const Value& a);
    Value reluOp(const Value& a);
    Value maxConst(const Value& a, double c);
    Value powi(const Value& a, int n);
    Value dot(std::span<const Value> a, std::span<const Value> b);

 private:
    struct Node {
        double data;
        double adjoint;
        uint32_t edgeBegin;
        uint32_t edgeCount;
        Op op;
    };
    struct Edge {
        int32_t parent;
        double partial;
    };

    Value wrap(double data, Op op, std::initializer_list<std::pair<const Value*, double>> parents);
    int32_t pushNode(double data, Op op, uint32_t edgeBegin, uint32_t edgeCount);
    // Appends an edge for v with the given partial; returns true if v
    // contributes gradient (non-constant).
    bool pushEdge(const Value& v, double partial);

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
};

// Zero vector-Jacobian product through this point; the data passes unchanged.
inline Value detach(const Value& v) { return Value(v.data()); }

// Operator sugar. Mixed double/Value arithmetic lifts constants for free.
Value operator+(const Value& a, const Value& b);
Value operator-(const Value& a, const Value& b);
Value operator*(const Value& a, const Value& b);
Value operator/(const Value& a, const Value& b);
Value operator-(const Value& a);

Value exp(const Value& a);
Value log(const Value& a);
Value sqrt(const Value& a);
Value sin(const Value& a);
Value cos(const Value& a);
Value sigmoid(const Value& a);
Value relu(const Value& a);
inline Value clampPositive(const Value& a) { return relu(a); }
Value maxWith(const Value& a, double c);
Value powi(const Value& a, int n);

}  // namespace eclipse::ad
