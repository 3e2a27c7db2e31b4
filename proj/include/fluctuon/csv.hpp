#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace fluctuon {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& header) : text_(header + "\n") {}
    template <class... T>
    void row(const T&... cells) {
        bool first = true;
        ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
        text_ += "\n";
    }
    const std::string& str() const { return text_; }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(unsigned long v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    std::string text_;
};

}  // namespace fluctuon
