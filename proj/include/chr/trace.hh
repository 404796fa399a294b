/*
 *  This program is free software; you can redistribute it and/or
 *  modify it under the terms of the Apache License, Version 2.0.
 *
 *  Copyright:
 *     2026, The cgchr authors
 *
 *     Licensed under the Apache License, Version 2.0 (the "License");
 *     you may not use this file except in compliance with the License.
 *     You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *     Unless required by applicable law or agreed to in writing, software
 *     distributed under the License is distributed on an "AS IS" BASIS,
 *     WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *     See the License for the specific language governing permissions and
 *     limitations under the License.
 *
 */

#ifndef CHR_TRACE_HH_
#define CHR_TRACE_HH_

#include <chr/store.hh>
#include <chr/syntax.hh>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/**
 * Text format, one step per line:
 *
 *     <seq> <Kind> [<rule>] <goal> <P>\<S> [id=N] [heads=[..]] [phi={..}] [worker=K interval=[s,c]]
 *
 * The goal is the constraint text for Activate and Solve and #id otherwise.
 * Lines starting with # are header and footer fields:
 *
 *     # trace engine=<name> workers=<n> seed=<s>
 *     # status=<done|failed|step-limit>
 *     # final <store dump line>
 */
namespace chr
{
	enum class StepKind
	{
		Solve, Activate, Simplify, Propagate, Drop
	};

	const char* to_string(StepKind k);

	enum class Status
	{
		Done, Failed, StepLimit
	};

	const char* to_string(Status s);

	struct TraceStep
	{
		std::uint64_t seq = 0;
		StepKind kind = StepKind::Drop;
		/// Rule name for Simplify and Propagate.
		std::string rule;
		/// Goal constraint for Solve and Activate.
		std::optional< Constraint > goal;
		/// Goal id for Simplify, Propagate and Drop; new id for Activate.
		Id id = 0;
		/// Side effect P \ S, ascending ids.
		std::vector< Id > propagated;
		std::vector< Id > simplified;
		/// Matched ids in rule head order.
		std::vector< Id > heads;
		Substitution phi;
		/// Concurrent engine only.
		int worker = -1;
		std::uint64_t start = 0;
		std::uint64_t commit = 0;

		bool is_firing() const { return kind == StepKind::Simplify || kind == StepKind::Propagate; }
		bool operator==(const TraceStep&) const = default;
	};

	struct Trace
	{
		std::string engine;
		unsigned workers = 1;
		std::uint64_t seed = 0;
		std::vector< TraceStep > steps;
		std::optional< Status > status;
		/// Store dump of the engine's final state.
		std::string final_store;

		bool operator==(const Trace&) const = default;
	};

	class TraceFormatError : public std::runtime_error
	{
	public:
		TraceFormatError(const std::string& msg, std::size_t line);
		std::size_t line() const { return _line; }

	private:
		std::size_t _line;
	};

	std::string to_string(const TraceStep& step);
	std::string serialize(const Trace& t);

	/**
	 * @brief Parse a serialized trace
	 *
	 * Variables in phi are read with the scope of the rule named on the
	 * same line, so the program is needed.
	 */
	Trace parse_trace(std::string_view text, const Program& p);
}

#endif /* CHR_TRACE_HH_ */
