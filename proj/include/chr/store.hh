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

#ifndef CHR_STORE_HH_
#define CHR_STORE_HH_

#include <chr/term.hh>

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace chr
{
	using Id = std::uint64_t;

	struct NumberedConstraint
	{
		Chr constraint;
		Id id;

		bool operator==(const NumberedConstraint&) const = default;
	};

	std::string to_string(const NumberedConstraint& nc);

	/// Raised by kill() when an id is not alive.
	class DeadId : public std::logic_error
	{
	public:
		explicit DeadId(Id id);
		Id id() const { return _id; }

	private:
		Id _id;
	};

	/**
	 * @brief Identified constraint store Sn
	 *
	 * CHR constraints are kept in normal form with respect to the solved
	 * form of the equations, so matching modulo the equations is plain
	 * syntactic matching on the stored terms. Dead entries stay in the
	 * table (tombstones) but leave every index.
	 *
	 * Not synchronized; the concurrent engine guards it with a lock.
	 */
	class Store
	{
	public:
		struct Entry
		{
			Chr constraint;
			bool alive = false;
			/// Tick of the last commit that read this entry as a kept head
			/// or woke it up. Maintained by the concurrent engine.
			std::uint64_t touched = 0;
		};

		Store() = default;

		/// Normalize c, assign the next id and index it.
		Id insert(const Chr& c);
		/// Insert under a given unused id (replay). Later insert() calls continue above it.
		void insert_with_id(const Chr& c, Id id);

		/// Mark every id dead. Either all are alive and killed or DeadId is thrown and nothing changes.
		void kill(std::span< const Id > ids);

		bool alive(Id id) const;
		/// Has this id ever been handed out?
		bool known(Id id) const { return id != 0 && id < _entries.size() && !_entries[id].constraint.pred.empty(); }
		const Chr& get(Id id) const { return _entries.at(id).constraint; }
		Entry& entry(Id id) { return _entries.at(id); }
		const Entry& entry(Id id) const { return _entries.at(id); }

		/**
		 * @brief Alive constraints that may match pattern under partial
		 *
		 * When some argument of the pattern is ground under partial the
		 * argument index is used, otherwise the predicate bucket. Ascending id.
		 */
		const std::set< Id >& candidates(const Chr& pattern, const Substitution& partial) const;
		const std::set< Id >& with_pred(const std::string& pred) const;

		/// Ids whose normal form would change if e were added. Pure query.
		std::vector< Id > wake_up(const Equation& e) const;

		struct Solved
		{
			std::vector< Id > woken;
			bool consistent = true;
		};

		/**
		 * @brief Add an equation and renormalize the affected constraints
		 *
		 * On inconsistency the equation is recorded, the store is flagged
		 * and no constraint is renormalized.
		 */
		Solved add_equation(const Equation& e);

		const std::vector< Equation >& equations() const { return _eqs; }
		const Substitution& theta() const { return _theta; }
		bool inconsistent() const { return _inconsistent; }

		std::vector< Id > alive_ids() const;
		std::size_t alive_count() const { return _alive; }
		/// Next id insert() would hand out.
		Id next_id() const { return _next; }

		/// {c | c#i alive} with equations appended.
		std::vector< Constraint > drop_ids() const;

		/// One line per constraint: pred(args)#id by id, then equations sorted.
		std::string dump() const;

	private:
		void index(Id id);
		void unindex(Id id);
		static std::string key(const std::string& pred, std::size_t pos, const Term& t);

		std::vector< Entry > _entries = std::vector< Entry >(1);
		std::unordered_map< std::string, std::set< Id > > _by_pred;
		std::unordered_map< std::string, std::set< Id > > _by_arg;
		/// Variable -> alive entries whose normal form mentions it.
		std::map< Var, std::set< Id > > _by_var;
		std::vector< Equation > _eqs;
		Substitution _theta;
		bool _inconsistent = false;
		std::size_t _alive = 0;
		Id _next = 1;
	};

	/**
	 * @brief Canonical text of a constraint multiset
	 *
	 * Equations are solved, CHR constraints normalized under the solution
	 * and sorted, then the solution's bindings are listed sorted. Two stores
	 * have the same canonical form iff they are equal modulo the equational
	 * theory. Inconsistent equation sets print as "{...} {false}".
	 */
	std::string canonical(std::span< const Constraint > cs);
}

#endif /* CHR_STORE_HH_ */
