#pragma once

#include <cstdint>
#include <string>

namespace ttvm {

// Runtime values are dynamically tagged: signed 64-bit integers or booleans.
class Value {
public:
    Value() : bits_(0), is_bool_(false) {}

    static Value from_int(int64_t v) {
        Value x;
        x.bits_ = v;
        x.is_bool_ = false;
        return x;
    }
    static Value from_bool(bool b) {
        Value x;
        x.bits_ = b ? 1 : 0;
        x.is_bool_ = true;
        return x;
    }

    bool is_int() const { return !is_bool_; }
    bool is_bool() const { return is_bool_; }
    int64_t as_int() const { return bits_; }
    bool as_bool() const { return bits_ != 0; }

    std::string to_string() const {
        if (is_bool_) return bits_ ? "true" : "false";
        return std::to_string(bits_);
    }

    friend bool operator==(const Value& a, const Value& b) {
        return a.is_bool_ == b.is_bool_ && a.bits_ == b.bits_;
    }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

private:
    int64_t bits_;
    bool is_bool_;
};

// Branch conditions accept any value: booleans are themselves, integers are
// true iff nonzero.
inline bool truthy(const Value& v) {
    if (v.is_bool()) return v.as_bool();
    return v.as_int() != 0;
}

} // namespace ttvm
