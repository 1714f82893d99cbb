// JSON emission with floats pinned to 17 significant digits (%.17g), which
// round-trips doubles exactly. Parsing goes through nlohmann::json.
#pragma once

#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace repunlearn {

std::string format_double17(double x);

// Minimal writer for the fixed document shapes this project persists.
class JsonWriter {
public:
    std::string str() const { return out_.str(); }

    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value_uint(std::uint64_t v);
    JsonWriter& value_array(std::span<const double> v);
    JsonWriter& value_array(std::span<const std::size_t> v);

private:
    void sep();
    std::ostringstream out_;
    std::vector<bool> first_stack_{};
    bool pending_key_{false};
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace repunlearn
