/** Investigator dashboard model: polls agreement stats and formats them.
 *
 * Every number shown comes from the service; this model only formats
 * (two decimals) and tracks staleness when a poll fails.
 */

import { AgreementStats, ApiClient } from "./api.js";

export interface DashboardRow {
  groupId: number;
  rate: string; // formatted to 2 decimals, e.g. "64.71"
}

export interface DashboardView {
  rows: DashboardRow[];
  average: string;
  nParticipants: number;
  nResponses: number;
  empty: boolean;
  stale: boolean;
}

export function formatRate(value: number): string {
  return value.toFixed(2);
}

export function toView(stats: AgreementStats, stale: boolean): DashboardView {
  const rows = Object.entries(stats.per_group)
    .map(([groupId, rate]) => ({ groupId: Number(groupId), rate: formatRate(rate) }))
    .sort((a, b) => a.groupId - b.groupId);
  return {
    rows,
    average: formatRate(stats.average),
    nParticipants: stats.n_participants,
    nResponses: stats.n_responses,
    empty: stats.n_groups === 0,
    stale,
  };
}

export class DashboardModel {
  private lastStats: AgreementStats | null = null;
  private stale = false;

  constructor(private readonly api: ApiClient) {}

  async poll(): Promise<DashboardView | null> {
    try {
      this.lastStats = await this.api.agreementStats();
      this.stale = false;
    } catch {
      this.stale = true; // keep showing the last data with a stale banner
    }
    return this.lastStats === null ? null : toView(this.lastStats, this.stale);
  }
}
