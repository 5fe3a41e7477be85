#pragma once

#include <stdexcept>
#include <string>

namespace ssmcast {

// Base for every failure the library reports. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

// Input file structure is wrong (missing column, no rows, bad cell).
class SchemaError : public Error {
public:
	using Error::Error;
};

class RowError : public SchemaError {
public:
	RowError(std::size_t line, const std::string &what)
	    : SchemaError("line " + std::to_string(line) + ": " + what), line_(line) {}
	std::size_t line() const noexcept { return line_; }

private:
	std::size_t line_;
};

class EmptyInputError : public SchemaError {
public:
	EmptyInputError() : SchemaError("no data rows") {}
};

class ParameterError : public Error {
public:
	using Error::Error;
};

class InsufficientDataError : public Error {
public:
	using Error::Error;
};

class DegeneratePeakError : public Error {
public:
	using Error::Error;
};

class EmptyCohortError : public Error {
public:
	using Error::Error;
};

class DegenerateTargetError : public Error {
public:
	using Error::Error;
};

class SingularDesignError : public Error {
public:
	SingularDesignError(const std::string &column, const std::string &what)
	    : Error(what), column_(column) {}
	const std::string &column() const noexcept { return column_; }

private:
	std::string column_;
};

class FitFailureError : public Error {
public:
	using Error::Error;
};

class CalibrationError : public Error {
public:
	using Error::Error;
};

class UnknownTargetError : public Error {
public:
	using Error::Error;
};

// Wraps a component failure with the pipeline stage it came from.
class PipelineError : public Error {
public:
	PipelineError(const std::string &stage, const std::string &what)
	    : Error(stage + ": " + what), stage_(stage) {}
	const std::string &stage() const noexcept { return stage_; }

private:
	std::string stage_;
};

} // namespace ssmcast
