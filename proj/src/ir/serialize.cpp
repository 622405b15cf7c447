#include "heco/ir/serialize.h"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace heco::ir {

namespace {

const char* shapeName(Shape s) { return s == Shape::kScalar ? "scalar" : "vector"; }
const char* stageName(Stage s) { return s == Stage::kHighLevel ? "hl" : "batched"; }

std::string attrText(const Op& op) {
  switch (op.kind) {
    case OpKind::kExtract:
    case OpKind::kInsert:
      return " {slot=" + std::to_string(op.attr) + "}";
    case OpKind::kRotate:
      return " {offset=" + std::to_string(op.attr) + "}";
    case OpKind::kConst:
      return " {value=" + std::to_string(op.attr) + "}";
    case OpKind::kVConst: {
      std::string out = " {values=[";
      for (size_t i = 0; i < op.values.size(); ++i) {
        if (i != 0) out += ",";
        out += std::to_string(op.values[i]);
      }
      return out + "]}";
    }
    default:
      return "";
  }
}

}  // namespace

std::string printIr(const IrFunction& f) {
  std::ostringstream os;
  os << "func @" << f.name << "(";
  for (size_t i = 0; i < f.params.size(); ++i) {
    const Param& p = f.params[i];
    if (i != 0) os << ", ";
    os << "%" << p.id << " " << p.name << ": " << typeName(p.type, f.slots);
  }
  os << ") -> " << shapeName(f.result_shape) << " [slots=" << f.slots << ", t=" << f.modulus
     << ", stage=" << stageName(f.stage) << "] {\n";
  for (const Op& op : f.ops) {
    os << "  %" << op.result << " = " << dialectName(op.dialect) << "." << opKindName(op.kind)
       << "(";
    for (size_t i = 0; i < op.operands.size(); ++i) {
      if (i != 0) os << ", ";
      os << "%" << op.operands[i];
    }
    os << ")" << attrText(op) << " : " << typeName(op.type, f.slots) << "\n";
  }
  os << "  return %" << f.ret << "\n}\n";
  return os.str();
}

std::string printModule(const std::vector<IrFunction>& fs) {
  std::string out;
  for (size_t i = 0; i < fs.size(); ++i) {
    if (i != 0) out += "\n";
    out += printIr(fs[i]);
  }
  return out;
}

namespace {

class IrParser {
 public:
  explicit IrParser(std::string_view text) : text_(text) {}

  std::vector<IrFunction> parseModule() {
    std::vector<IrFunction> out;
    skipSpace();
    while (!atEnd()) {
      out.push_back(parseFunction());
      skipSpace();
    }
    return out;
  }

 private:
  bool atEnd() const { return pos_ >= text_.size(); }
  char peek() const { return atEnd() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skipSpace() {
    while (!atEnd() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw CompileError(ErrorKind::kIrParse, message, SourceLoc{line_, column_});
  }

  void expect(std::string_view literal) {
    skipSpace();
    if (text_.substr(pos_, literal.size()) != literal) {
      fail("expected '" + std::string(literal) + "'");
    }
    for (size_t i = 0; i < literal.size(); ++i) advance();
  }

  bool accept(std::string_view literal) {
    skipSpace();
    if (text_.substr(pos_, literal.size()) != literal) return false;
    for (size_t i = 0; i < literal.size(); ++i) advance();
    return true;
  }

  std::string word() {
    skipSpace();
    size_t start = pos_;
    while (!atEnd() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
      advance();
    }
    if (start == pos_) fail("expected an identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  int64_t integer() {
    skipSpace();
    size_t start = pos_;
    if (peek() == '-') advance();
    while (!atEnd() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) fail("expected an integer");
    return value;
  }

  ValueId valueRef() {
    expect("%");
    int64_t v = integer();
    if (v < 0 || v >= static_cast<int64_t>(kNoValue)) fail("invalid value id");
    return static_cast<ValueId>(v);
  }

  Type type(int64_t slots) {
    skipSpace();
    SourceLoc at{line_, column_};
    std::string w = word();
    auto checkSlots = [&](int64_t n) {
      if (n != slots) {
        throw CompileError(ErrorKind::kIrParse,
                           "type slot count " + std::to_string(n) + " does not match function (" +
                               std::to_string(slots) + ")",
                           at);
      }
    };
    if (w == "secret") return Type::kSecretScalar;
    if (w == "plain") return Type::kPlainScalar;
    if (w == "tensor") {
      expect("<");
      checkSlots(integer());
      expect("xsecret");
      expect(">");
      return Type::kSecretVector;
    }
    if (w == "batched" || w == "plainvec") {
      expect("<");
      checkSlots(integer());
      expect(">");
      return w == "batched" ? Type::kBatchedSecret : Type::kPlainVector;
    }
    throw CompileError(ErrorKind::kIrParse, "unknown type '" + w + "'", at);
  }

  void define(ValueId v) {
    if (!defined_.insert(v).second) fail("duplicate value id %" + std::to_string(v));
  }

  IrFunction parseFunction() {
    defined_.clear();
    IrFunction f;
    expect("func");
    expect("@");
    f.name = word();
    expect("(");
    // Parameter types depend on the slot count declared later in the header,
    // so remember their position and parse them afterwards.
    struct Deferred {
      ValueId id;
      std::string name;
      size_t pos;
      int line, column;
    };
    std::vector<Deferred> deferred;
    if (!accept(")")) {
      do {
        ValueId id = valueRef();
        std::string name = word();
        expect(":");
        skipSpace();
        deferred.push_back({id, name, pos_, line_, column_});
        while (!atEnd() && peek() != ',' && peek() != ')') advance();
      } while (accept(","));
      expect(")");
    }
    expect("->");
    std::string shape = word();
    if (shape == "scalar") {
      f.result_shape = Shape::kScalar;
    } else if (shape == "vector") {
      f.result_shape = Shape::kVector;
    } else {
      fail("expected 'scalar' or 'vector'");
    }
    expect("[");
    expect("slots");
    expect("=");
    f.slots = integer();
    expect(",");
    expect("t");
    expect("=");
    f.modulus = static_cast<uint64_t>(integer());
    expect(",");
    expect("stage");
    expect("=");
    std::string stage = word();
    if (stage == "hl") {
      f.stage = Stage::kHighLevel;
    } else if (stage == "batched") {
      f.stage = Stage::kBatched;
    } else {
      fail("unknown stage '" + stage + "'");
    }
    expect("]");
    expect("{");

    size_t resume = pos_;
    int resumeLine = line_, resumeColumn = column_;
    for (const auto& d : deferred) {
      pos_ = d.pos;
      line_ = d.line;
      column_ = d.column;
      define(d.id);
      f.params.push_back({d.id, type(f.slots), d.name});
    }
    pos_ = resume;
    line_ = resumeLine;
    column_ = resumeColumn;

    while (true) {
      if (accept("return")) {
        f.ret = valueRef();
        expect("}");
        return f;
      }
      f.ops.push_back(parseOp(f.slots));
    }
  }

  Op parseOp(int64_t slots) {
    Op op;
    SourceLoc at{line_, column_};
    op.result = valueRef();
    expect("=");
    std::string dialect = word();
    if (dialect == "hl") {
      op.dialect = Dialect::kHl;
    } else if (dialect == "bsf") {
      op.dialect = Dialect::kBsf;
    } else {
      fail("unknown dialect '" + dialect + "'");
    }
    expect(".");
    std::string kind = word();
    auto k = parseOpKind(kind);
    if (!k) fail("unknown op '" + kind + "'");
    op.kind = *k;
    expect("(");
    if (!accept(")")) {
      do {
        op.operands.push_back(valueRef());
      } while (accept(","));
      expect(")");
    }
    if (accept("{")) {
      std::string key = word();
      expect("=");
      if (key == "values") {
        expect("[");
        if (!accept("]")) {
          do {
            op.values.push_back(static_cast<uint64_t>(integer()));
          } while (accept(","));
          expect("]");
        }
      } else {
        op.attr = integer();
      }
      expect("}");
      const char* wanted = op.kind == OpKind::kRotate                                 ? "offset"
                           : op.kind == OpKind::kConst                                ? "value"
                           : op.kind == OpKind::kVConst                               ? "values"
                           : op.kind == OpKind::kExtract || op.kind == OpKind::kInsert ? "slot"
                                                                                      : "";
      if (key != wanted) fail("unexpected attribute '" + key + "'");
    }
    expect(":");
    op.type = type(slots);
    if (!defined_.insert(op.result).second) {
      throw CompileError(ErrorKind::kIrParse, "duplicate value id %" + std::to_string(op.result),
                         at);
    }
    return op;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::set<ValueId> defined_;
};

Type typeFromName(const std::string& name, int64_t slots) {
  for (Type t : {Type::kSecretScalar, Type::kSecretVector, Type::kBatchedSecret,
                 Type::kPlainScalar, Type::kPlainVector}) {
    if (typeName(t, slots) == name) return t;
  }
  throw CompileError(ErrorKind::kIrParse, "unknown type '" + name + "'");
}

}  // namespace

IrFunction parseIr(std::string_view text) {
  auto fs = IrParser(text).parseModule();
  if (fs.size() != 1) {
    throw CompileError(ErrorKind::kIrParse,
                       "expected exactly one function, found " + std::to_string(fs.size()));
  }
  return std::move(fs.front());
}

std::vector<IrFunction> parseModule(std::string_view text) { return IrParser(text).parseModule(); }

nlohmann::json exportJson(const IrFunction& f) {
  nlohmann::json j;
  j["name"] = f.name;
  j["modulus"] = f.modulus;
  j["slots"] = f.slots;
  j["stage"] = stageName(f.stage);
  j["result_shape"] = shapeName(f.result_shape);
  j["params"] = nlohmann::json::array();
  for (const auto& p : f.params) {
    j["params"].push_back({{"id", p.id}, {"name", p.name}, {"type", typeName(p.type, f.slots)}});
  }
  j["ops"] = nlohmann::json::array();
  for (const auto& op : f.ops) {
    nlohmann::json attrs = nlohmann::json::object();
    switch (op.kind) {
      case OpKind::kExtract:
      case OpKind::kInsert: attrs["slot"] = op.attr; break;
      case OpKind::kRotate: attrs["offset"] = op.attr; break;
      case OpKind::kConst: attrs["value"] = op.attr; break;
      case OpKind::kVConst: attrs["values"] = op.values; break;
      default: break;
    }
    j["ops"].push_back({{"id", op.result},
                        {"kind", std::string(dialectName(op.dialect)) + "." + opKindName(op.kind)},
                        {"operands", op.operands},
                        {"attrs", attrs},
                        {"type", typeName(op.type, f.slots)}});
  }
  j["ret"] = f.ret;
  return j;
}

IrFunction importJson(const nlohmann::json& j) {
  try {
    IrFunction f;
    f.name = j.at("name").get<std::string>();
    f.modulus = j.at("modulus").get<uint64_t>();
    f.slots = j.at("slots").get<int64_t>();
    f.stage = j.at("stage").get<std::string>() == "batched" ? Stage::kBatched : Stage::kHighLevel;
    f.result_shape =
        j.at("result_shape").get<std::string>() == "vector" ? Shape::kVector : Shape::kScalar;
    for (const auto& p : j.at("params")) {
      f.params.push_back({p.at("id").get<ValueId>(),
                          typeFromName(p.at("type").get<std::string>(), f.slots),
                          p.at("name").get<std::string>()});
    }
    for (const auto& o : j.at("ops")) {
      Op op;
      op.result = o.at("id").get<ValueId>();
      std::string kind = o.at("kind").get<std::string>();
      auto dot = kind.find('.');
      if (dot == std::string::npos) throw CompileError(ErrorKind::kIrParse, "bad op kind " + kind);
      op.dialect = kind.substr(0, dot) == "hl" ? Dialect::kHl : Dialect::kBsf;
      auto k = parseOpKind(kind.substr(dot + 1));
      if (!k) throw CompileError(ErrorKind::kIrParse, "bad op kind " + kind);
      op.kind = *k;
      op.operands = o.at("operands").get<std::vector<ValueId>>();
      const auto& attrs = o.at("attrs");
      for (const char* key : {"slot", "offset", "value"}) {
        if (attrs.contains(key)) op.attr = attrs.at(key).get<int64_t>();
      }
      if (attrs.contains("values")) op.values = attrs.at("values").get<std::vector<uint64_t>>();
      op.type = typeFromName(o.at("type").get<std::string>(), f.slots);
      f.ops.push_back(std::move(op));
    }
    f.ret = j.at("ret").get<ValueId>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw CompileError(ErrorKind::kIrParse, std::string("malformed IR JSON: ") + e.what());
  }
}

}  // namespace heco::ir
