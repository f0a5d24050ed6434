/** Survey session flow, independent of the DOM.
 *
 * A session walks the participant's shuffled group order; the cursor only
 * advances after the service confirms the answer (or reports it as a
 * duplicate, which means it is already stored).  State persists through a
 * pluggable storage so a refresh resumes at the first unanswered group.
 */

import { ApiClient, Emotion, SurveyAnswer } from "./api.js";
import { participantOrder } from "./shuffle.js";

export interface SessionState {
  participantId: string;
  order: number[];
  submitted: number[];
}

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

const STORAGE_PREFIX = "meme-survey:";

export function loadSessionState(
  storage: KeyValueStore,
  participantId: string,
  groupIds: number[],
): SessionState {
  const raw = storage.getItem(STORAGE_PREFIX + participantId);
  if (raw) {
    const saved = JSON.parse(raw) as SessionState;
    const known = new Set(groupIds);
    if (
      saved.participantId === participantId &&
      saved.order.length === groupIds.length &&
      saved.order.every((g) => known.has(g))
    ) {
      return saved;
    }
  }
  return {
    participantId,
    order: participantOrder(participantId, groupIds),
    submitted: [],
  };
}

export function saveSessionState(storage: KeyValueStore, state: SessionState): void {
  storage.setItem(STORAGE_PREFIX + state.participantId, JSON.stringify(state));
}

export interface SubmitResult {
  accepted: boolean;
  finished: boolean;
}

export class SessionController {
  readonly state: SessionState;
  private inFlight = false;

  constructor(
    private readonly api: ApiClient,
    private readonly storage: KeyValueStore,
    participantId: string,
    groupIds: number[],
    private readonly retries: number = 2,
  ) {
    this.state = loadSessionState(storage, participantId, groupIds);
  }

  /** First unanswered group in this participant's order, or null when done. */
  currentGroup(): number | null {
    const done = new Set(this.state.submitted);
    for (const groupId of this.state.order) {
      if (!done.has(groupId)) {
        return groupId;
      }
    }
    return null;
  }

  answeredCount(): number {
    return this.state.submitted.length;
  }

  totalCount(): number {
    return this.state.order.length;
  }

  finished(): boolean {
    return this.currentGroup() === null;
  }

  /**
   * Submit the answer for the current group.  Network failures retry with
   * the same payload; the server's (participant, group) dedupe makes the
   * resubmission idempotent, and a duplicate report counts as answered.
   */
  async submit(similar: boolean, emotion?: Emotion): Promise<SubmitResult> {
    const groupId = this.currentGroup();
    if (groupId === null || this.inFlight) {
      return { accepted: false, finished: this.finished() };
    }
    this.inFlight = true;
    try {
      const answer: SurveyAnswer = {
        participant_id: this.state.participantId,
        group_id: groupId,
        similar,
        ...(emotion ? { emotion } : {}),
      };
      let lastError: unknown = null;
      for (let attempt = 0; attempt <= this.retries; attempt++) {
        try {
          await this.api.postResponse(answer);
          lastError = null;
          break;
        } catch (error) {
          lastError = error;
        }
      }
      if (lastError !== null) {
        throw lastError;
      }
      this.state.submitted.push(groupId);
      saveSessionState(this.storage, this.state);
      return { accepted: true, finished: this.finished() };
    } finally {
      this.inFlight = false;
    }
  }
}

export type SurveyAction =
  | { kind: "similar"; value: boolean }
  | { kind: "emotion"; value: Emotion }
  | { kind: "submit" }
  | { kind: "toggle-captions" }
  | { kind: "none" };

const EMOTION_KEYS: Emotion[] = ["sadness", "joy", "love", "anger", "fear", "surprise"];

/** Keyboard contract: y/n for similarity, 1-6 for emotion, Enter submits,
 * c toggles captions. */
export function keyToAction(key: string): SurveyAction {
  const k = key.toLowerCase();
  if (k === "y") return { kind: "similar", value: true };
  if (k === "n") return { kind: "similar", value: false };
  if (k === "enter") return { kind: "submit" };
  if (k === "c") return { kind: "toggle-captions" };
  const digit = Number.parseInt(k, 10);
  if (digit >= 1 && digit <= 6) {
    return { kind: "emotion", value: EMOTION_KEYS[digit - 1] };
  }
  return { kind: "none" };
}
