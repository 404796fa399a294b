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

#include <chr/store.hh>

#include <algorithm>

namespace chr
{
	namespace
	{
		const std::set< Id > no_ids;
	}

	std::string to_string(const NumberedConstraint& nc)
	{
		return to_string(nc.constraint) + "#" + std::to_string(nc.id);
	}

	DeadId::DeadId(Id id)
		: std::logic_error("constraint #" + std::to_string(id) + " is not alive"), _id(id)
	{ }

	std::string Store::key(const std::string& pred, std::size_t pos, const Term& t)
	{
		std::string k = pred;
		k += '/';
		k += std::to_string(pos);
		k += '/';
		k += to_string(t);
		return k;
	}

	void Store::index(Id id)
	{
		const Chr& c = _entries[id].constraint;
		_by_pred[c.pred].insert(id);
		for (std::size_t i = 0; i < c.args.size(); ++i)
			if (is_ground(c.args[i]))
				_by_arg[key(c.pred, i, c.args[i])].insert(id);
		std::set< Var > vs;
		for (const auto& a : c.args)
			collect_vars(a, vs);
		for (const auto& v : vs)
			_by_var[v].insert(id);
	}

	void Store::unindex(Id id)
	{
		const Chr& c = _entries[id].constraint;
		auto drop = [id](auto& map, const auto& k) {
			auto it = map.find(k);
			if (it == map.end()) return;
			it->second.erase(id);
			if (it->second.empty()) map.erase(it);
		};
		drop(_by_pred, c.pred);
		for (std::size_t i = 0; i < c.args.size(); ++i)
			if (is_ground(c.args[i]))
				drop(_by_arg, key(c.pred, i, c.args[i]));
		std::set< Var > vs;
		for (const auto& a : c.args)
			collect_vars(a, vs);
		for (const auto& v : vs)
			drop(_by_var, v);
	}

	Id Store::insert(const Chr& c)
	{
		Id id = _next;
		insert_with_id(c, id);
		return id;
	}

	void Store::insert_with_id(const Chr& c, Id id)
	{
		if (id == 0 || known(id))
			throw std::logic_error("id #" + std::to_string(id) + " already used");
		if (_entries.size() <= id)
			_entries.resize(id + 1);
		_entries[id] = Entry{normalize(_theta, c), true, 0};
		index(id);
		++_alive;
		_next = std::max(_next, id + 1);
	}

	void Store::kill(std::span< const Id > ids)
	{
		for (std::size_t i = 0; i < ids.size(); ++i)
		{
			if (!alive(ids[i])) throw DeadId(ids[i]);
			for (std::size_t j = 0; j < i; ++j)
				if (ids[j] == ids[i]) throw DeadId(ids[i]);
		}
		for (Id id : ids)
		{
			unindex(id);
			_entries[id].alive = false;
			--_alive;
		}
	}

	bool Store::alive(Id id) const
	{
		return id != 0 && id < _entries.size() && _entries[id].alive;
	}

	const std::set< Id >& Store::with_pred(const std::string& pred) const
	{
		auto it = _by_pred.find(pred);
		return it == _by_pred.end() ? no_ids : it->second;
	}

	const std::set< Id >& Store::candidates(const Chr& pattern, const Substitution& partial) const
	{
		for (std::size_t i = 0; i < pattern.args.size(); ++i)
		{
			Term t = apply(partial, pattern.args[i]);
			if (!is_ground(t)) continue;
			auto it = _by_arg.find(key(pattern.pred, i, simplify_ground(t)));
			return it == _by_arg.end() ? no_ids : it->second;
		}
		return with_pred(pattern.pred);
	}

	namespace
	{
		// Variables bound by after but not by before.
		std::vector< Var > newly_bound(const Substitution& before, const Substitution& after)
		{
			std::vector< Var > out;
			for (const auto& [v, t] : after)
				if (!before.find(v))
					out.push_back(v);
			return out;
		}
	}

	std::vector< Id > Store::wake_up(const Equation& e) const
	{
		if (_inconsistent) return {};
		Substitution next = _theta;
		if (!unify_into(next, e.lhs, e.rhs)) return {};
		std::set< Id > woken;
		for (const auto& v : newly_bound(_theta, next))
		{
			auto it = _by_var.find(v);
			if (it != _by_var.end())
				woken.insert(it->second.begin(), it->second.end());
		}
		return {woken.begin(), woken.end()};
	}

	Store::Solved Store::add_equation(const Equation& e)
	{
		_eqs.push_back(e);
		if (_inconsistent) return {{}, false};
		Substitution next = _theta;
		if (!unify_into(next, e.lhs, e.rhs))
		{
			_inconsistent = true;
			return {{}, false};
		}
		std::vector< Id > woken = wake_up(e);
		for (Id id : woken)
			unindex(id);
		_theta = std::move(next);
		for (Id id : woken)
		{
			_entries[id].constraint = normalize(_theta, _entries[id].constraint);
			index(id);
		}
		return {std::move(woken), true};
	}

	std::vector< Id > Store::alive_ids() const
	{
		std::vector< Id > ids;
		ids.reserve(_alive);
		for (Id id = 1; id < _entries.size(); ++id)
			if (_entries[id].alive) ids.push_back(id);
		return ids;
	}

	std::vector< Constraint > Store::drop_ids() const
	{
		std::vector< Constraint > out;
		for (Id id = 1; id < _entries.size(); ++id)
			if (_entries[id].alive) out.push_back(_entries[id].constraint);
		for (const auto& e : _eqs)
			out.push_back(e);
		return out;
	}

	std::string Store::dump() const
	{
		std::string out;
		for (Id id = 1; id < _entries.size(); ++id)
			if (_entries[id].alive)
				out += to_string(_entries[id].constraint) + "#" + std::to_string(id) + "\n";
		std::vector< std::string > eqs;
		for (const auto& e : _eqs)
			eqs.push_back(to_string(e));
		std::sort(eqs.begin(), eqs.end());
		for (const auto& e : eqs)
			out += e + "\n";
		return out;
	}

	std::string canonical(std::span< const Constraint > cs)
	{
		std::vector< Equation > eqs;
		for (const auto& c : cs)
			if (const auto* e = std::get_if< Equation >(&c))
				eqs.push_back(*e);
		auto theta = mgu(eqs);
		Substitution none;
		const Substitution& s = theta ? *theta : none;

		std::vector< std::string > chrs;
		for (const auto& c : cs)
			if (const auto* chr = std::get_if< Chr >(&c))
				chrs.push_back(to_string(normalize(s, *chr)));
		std::sort(chrs.begin(), chrs.end());

		std::string out = "{";
		for (std::size_t i = 0; i < chrs.size(); ++i)
		{
			if (i) out += ',';
			out += chrs[i];
		}
		out += "} {";
		if (!theta)
			return out + "false}";
		std::vector< std::string > binds;
		for (const auto& [v, t] : s)
			binds.push_back(v.name + "=" + to_string(t));
		std::sort(binds.begin(), binds.end());
		for (std::size_t i = 0; i < binds.size(); ++i)
		{
			if (i) out += ',';
			out += binds[i];
		}
		return out + "}";
	}
}
