#ifndef FAIRVAL_SRC_TEXT_HPP
#define FAIRVAL_SRC_TEXT_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairval::detail {

inline std::string_view trim(std::string_view s)
{
    constexpr std::string_view ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if(b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    size_t start = 0;
    while(true) {
        auto pos = s.find(sep, start);
        if(pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline std::string lower(std::string_view s)
{
    std::string out(s);
    for(auto &c : out) {
        if(c >= 'A' && c <= 'Z') {
            c = char(c - 'A' + 'a');
        }
    }
    return out;
}

} // namespace fairval::detail

#endif
