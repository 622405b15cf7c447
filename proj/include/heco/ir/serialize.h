#ifndef HECO_IR_SERIALIZE_H_
#define HECO_IR_SERIALIZE_H_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "heco/ir/ir.h"

namespace heco::ir {

/// Textual IR, one op per line:
///
///   func @dot(%0 x: tensor<8xsecret>, %1 y: tensor<8xsecret>) -> scalar [slots=8, t=65537, stage=hl] {
///     %2 = hl.extract(%0) {slot=0} : secret
///     ...
///     return %17
///   }
std::string printIr(const IrFunction& f);
std::string printModule(const std::vector<IrFunction>& fs);

/// Parses text produced by printIr. Throws CompileError(kIrParse) with a
/// line/column on malformed input, including duplicate value ids.
IrFunction parseIr(std::string_view text);
std::vector<IrFunction> parseModule(std::string_view text);

/// Loss-free JSON form:
/// {name, modulus, slots, stage, result_shape, params:[{id,name,type}],
///  ops:[{id,kind,operands,attrs,type}], ret}. `kind` is "<dialect>.<op>".
nlohmann::json exportJson(const IrFunction& f);
IrFunction importJson(const nlohmann::json& j);

}  // namespace heco::ir

#endif  // HECO_IR_SERIALIZE_H_
