/** Sortable design tables for the drill-down panels. */

import { fmt, fmtInt } from "./format.js";
import type { DesignRow } from "./types.js";

export interface Column {
  key: string;
  label: string;
  value: (row: DesignRow) => number | null;
  render: (row: DesignRow) => string;
}

export function designColumns(includeIndividual: boolean): Column[] {
  const base: Column[] = [
    { key: "I", label: "I", value: (r) => r.I, render: (r) => fmtInt(r.I) },
    { key: "J", label: "J", value: (r) => r.J, render: (r) => fmtInt(r.J) },
    { key: "K", label: "K", value: (r) => r.K, render: (r) => fmtInt(r.K) },
    { key: "L", label: "L", value: (r) => r.L, render: (r) => fmtInt(r.L) },
    { key: "total", label: "Total", value: (r) => r.total, render: (r) => fmtInt(r.total) },
    { key: "se_pop", label: "SE (population)", value: (r) => r.se_pop, render: (r) => fmt(r.se_pop) },
    { key: "power", label: "Power", value: (r) => r.power, render: (r) => fmt(r.power) },
  ];
  if (!includeIndividual) return base;
  return base.concat([
    { key: "naive_mean", label: "Naive SE", value: (r) => r.naive_mean, render: (r) => fmt(r.naive_mean) },
    { key: "shrunk_fixed", label: "Shrunken SE (fixed int.)", value: (r) => r.shrunk_fixed, render: (r) => fmt(r.shrunk_fixed) },
    { key: "shrunk_random", label: "Shrunken SE (random int.)", value: (r) => r.shrunk_random, render: (r) => fmt(r.shrunk_random) },
  ]);
}

interface SortState {
  key: string;
  ascending: boolean;
}

const sortStates = new WeakMap<HTMLElement, SortState>();

export function renderDesignTable(
  container: HTMLElement,
  rows: DesignRow[],
  includeIndividual: boolean,
): void {
  container.textContent = "";
  if (rows.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No design satisfies the requirement here.";
    container.appendChild(empty);
    return;
  }
  const columns = designColumns(includeIndividual);
  const sort = sortStates.get(container);
  const sorted = [...rows];
  if (sort) {
    const column = columns.find((c) => c.key === sort.key);
    if (column) {
      sorted.sort((a, b) => {
        const va = column.value(a) ?? Number.POSITIVE_INFINITY;
        const vb = column.value(b) ?? Number.POSITIVE_INFINITY;
        return sort.ascending ? va - vb : vb - va;
      });
    }
  }

  const table = document.createElement("table");
  table.className = "design-table";
  const head = table.createTHead().insertRow();
  for (const column of columns) {
    const th = document.createElement("th");
    th.textContent = column.label
      + (sort?.key === column.key ? (sort.ascending ? " ▲" : " ▼") : "");
    th.tabIndex = 0;
    th.addEventListener("click", () => {
      const prev = sortStates.get(container);
      sortStates.set(container, {
        key: column.key,
        ascending: prev?.key === column.key ? !prev.ascending : true,
      });
      renderDesignTable(container, rows, includeIndividual);
    });
    head.appendChild(th);
  }
  const body = table.createTBody();
  for (const row of sorted) {
    const tr = body.insertRow();
    for (const column of columns) {
      const td = tr.insertCell();
      td.textContent = column.render(row);
      td.dataset.key = column.key;
    }
    tr.dataset.design = `${row.I},${row.J},${row.K},${row.L}`;
  }
  container.appendChild(table);
}
