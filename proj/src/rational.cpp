#include "minbrain/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace minbrain {

Rat parse_rational(const std::string& text) {
    if (text.empty()) fail("SchemaError", "empty rational literal");
    try {
        if (text.find('/') != std::string::npos) {
            Rat q(text, 10);
            q.canonicalize();
            return q;
        }
        auto dot = text.find('.');
        if (dot == std::string::npos) return Rat(mpz_class(text, 10));
        // Decimal literal: digits '.' digits, optional sign.
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t frac_len = text.size() - dot - 1;
        if (frac_len == 0) fail("SchemaError", "bad rational literal: " + text);
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (i == 0 && (digits[i] == '+' || digits[i] == '-')) continue;
            if (!std::isdigit(static_cast<unsigned char>(digits[i])))
                fail("SchemaError", "bad rational literal: " + text);
        }
        mpz_class den = 1;
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        Rat q(mpz_class(digits, 10), den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        fail("SchemaError", "bad rational literal: " + text);
    }
}

std::string rational_to_string(const Rat& value) {
    return value.get_str();
}

}  // namespace minbrain
