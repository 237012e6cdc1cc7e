#ifndef QSAT_JSONOUT_HPP
#define QSAT_JSONOUT_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qsat {

// %.17g: enough digits to round-trip any double exactly.
inline std::string fmt_double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Streaming JSON emitter with explicit key order and fixed float
// formatting, so equal inputs always produce byte-identical files.
// (Generic JSON libraries make their own ordering/precision choices.)
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(std::string_view k) {
        comma();
        indent();
        write_string(k);
        os_ << ": ";
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(std::string_view s) {
        lead();
        write_string(s);
        return *this;
    }
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }
    JsonWriter& value(bool b) {
        lead();
        os_ << (b ? "true" : "false");
        return *this;
    }
    JsonWriter& value(uint64_t v) {
        lead();
        os_ << v;
        return *this;
    }
    JsonWriter& value(int64_t v) {
        lead();
        os_ << v;
        return *this;
    }
    JsonWriter& value(int v) { return value(int64_t(v)); }
    JsonWriter& value(double v) {
        lead();
        if (std::isnan(v))
            os_ << "null";
        else
            os_ << fmt_double17(v);
        return *this;
    }
    JsonWriter& value_null() {
        lead();
        os_ << "null";
        return *this;
    }

    void finish() { os_ << "\n"; }

private:
    JsonWriter& open(char c) {
        lead();
        os_ << c;
        stack_.push_back(c);
        first_.push_back(true);
        return *this;
    }

    JsonWriter& close(char c) {
        bool empty = first_.back();
        stack_.pop_back();
        first_.pop_back();
        if (!empty) {
            os_ << "\n";
            indent();
        }
        os_ << c;
        return *this;
    }

    void lead() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        comma();
        indent();
    }

    void comma() {
        if (stack_.empty()) return;
        if (first_.back())
            first_.back() = false;
        else
            os_ << ",";
        os_ << "\n";
    }

    void indent() {
        for (size_t i = 0; i < stack_.size(); ++i) os_ << "  ";
    }

    void write_string(std::string_view s) {
        os_ << '"';
        for (char c : s) {
            switch (c) {
            case '"': os_ << "\\\""; break;
            case '\\': os_ << "\\\\"; break;
            case '\n': os_ << "\\n"; break;
            case '\t': os_ << "\\t"; break;
            case '\r': os_ << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x",
                                  unsigned(static_cast<unsigned char>(c)));
                    os_ << buf;
                } else {
                    os_ << c;
                }
            }
        }
        os_ << '"';
    }

    std::ostream& os_;
    std::vector<char> stack_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

} // namespace qsat

#endif
