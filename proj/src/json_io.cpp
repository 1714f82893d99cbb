#include "repunlearn/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace repunlearn {

std::string format_double17(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void JsonWriter::sep() {
    if (!first_stack_.empty() && !pending_key_) {
        if (!first_stack_.back()) out_ << ",";
        first_stack_.back() = false;
    }
    pending_key_ = false;
}

JsonWriter& JsonWriter::begin_object() {
    sep();
    out_ << "{";
    first_stack_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ << "}";
    first_stack_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    sep();
    out_ << "[";
    first_stack_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ << "]";
    first_stack_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    sep();
    out_ << "\"" << k << "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    sep();
    out_ << format_double17(v);
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    sep();
    out_ << "\"";
    for (char c : v) {
        if (c == '"' || c == '\\') out_ << '\\';
        out_ << c;
    }
    out_ << "\"";
    return *this;
}

JsonWriter& JsonWriter::value_uint(std::uint64_t v) {
    sep();
    out_ << v;
    return *this;
}

JsonWriter& JsonWriter::value_array(std::span<const double> v) {
    begin_array();
    for (double x : v) value(x);
    end_array();
    return *this;
}

JsonWriter& JsonWriter::value_array(std::span<const std::size_t> v) {
    begin_array();
    for (std::size_t x : v) value_uint(x);
    end_array();
    return *this;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace repunlearn
