#pragma once

#include <stdexcept>
#include <string>

namespace fclkp {

// Base class for all library errors. `tag()` is a short stable identifier
// used by the CLI to pick exit codes and by tests to match error kinds.
class error : public std::runtime_error {
public:
    error(std::string tag, const std::string& what)
        : std::runtime_error(tag + ": " + what), tag_(std::move(tag)) {}
    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

struct dim_error : error {
    explicit dim_error(const std::string& what) : error("dim", what) {}
};

struct branch_error : error {
    explicit branch_error(const std::string& what) : error("branch", what) {}
};

struct shape_error : error {
    explicit shape_error(const std::string& what) : error("shape", what) {}
};

struct watermark_error : error {
    explicit watermark_error(const std::string& what) : error("watermark", what) {}
};

struct not_invertible_error : error {
    explicit not_invertible_error(const std::string& what) : error("not-invertible", what) {}
};

struct order_error : error {
    explicit order_error(const std::string& what) : error("order", what) {}
};

struct param_error : error {
    explicit param_error(const std::string& what) : error("param", what) {}
};

struct grade_error : error {
    explicit grade_error(std::string tag, const std::string& what) : error(std::move(tag), what) {}
};

struct gauge_error : error {
    explicit gauge_error(const std::string& what) : error("nonabelian-gauge", what) {}
};

struct parse_error : error {
    explicit parse_error(const std::string& what) : error("parse", what) {}
};

} // namespace fclkp
