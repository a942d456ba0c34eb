#pragma once

#include <cstdint>
#include <vector>

#include "proxkit/verify.hpp"

namespace proxkit::verify::suites {

using SuiteFn = std::vector<Case> (*)(std::uint64_t seed, const Scale& scale);

std::vector<Case> lemmas(std::uint64_t, const Scale&);
std::vector<Case> prop1(std::uint64_t, const Scale&);
std::vector<Case> prop4(std::uint64_t, const Scale&);
std::vector<Case> prop5(std::uint64_t, const Scale&);
std::vector<Case> prop6(std::uint64_t, const Scale&);
std::vector<Case> prop7(std::uint64_t, const Scale&);
std::vector<Case> prop9(std::uint64_t, const Scale&);
std::vector<Case> prop10(std::uint64_t, const Scale&);
std::vector<Case> cor11(std::uint64_t, const Scale&);
std::vector<Case> prop13(std::uint64_t, const Scale&);
std::vector<Case> prop16(std::uint64_t, const Scale&);
std::vector<Case> prop17(std::uint64_t, const Scale&);
std::vector<Case> prop18(std::uint64_t, const Scale&);
std::vector<Case> cor19(std::uint64_t, const Scale&);

std::vector<Case> prop20(std::uint64_t, const Scale&);
std::vector<Case> prop25(std::uint64_t, const Scale&);
std::vector<Case> prop30_i(std::uint64_t, const Scale&);
std::vector<Case> ex_proj(std::uint64_t, const Scale&);
std::vector<Case> ex_comp(std::uint64_t, const Scale&);
std::vector<Case> ex_yama(std::uint64_t, const Scale&);
std::vector<Case> thm45_i(std::uint64_t, const Scale&);
std::vector<Case> thm45_iv(std::uint64_t, const Scale&);
std::vector<Case> thm45_vi(std::uint64_t, const Scale&);
std::vector<Case> cor46(std::uint64_t, const Scale&);
std::vector<Case> prop55(std::uint64_t, const Scale&);

std::vector<Case> thm65(std::uint64_t, const Scale&);
std::vector<Case> thm70(std::uint64_t, const Scale&);
std::vector<Case> prop75(std::uint64_t, const Scale&);
std::vector<Case> prop79(std::uint64_t, const Scale&);
std::vector<Case> prop80(std::uint64_t, const Scale&);

}  // namespace proxkit::verify::suites
