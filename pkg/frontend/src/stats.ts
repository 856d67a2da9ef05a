/** Running entry statistics folded from the commit stream.
 *
 * All times come from the server's `t_ms` stamps, so a live session and a
 * later replay of its log agree on every number reported here.  Text is
 * taken from the authoritative snapshots carried by commit and undo
 * messages rather than reassembled locally.
 */

export interface StatsSummary {
  commits: number;
  undos: number;
  chars: number;
  seconds: number;
  charsPerMin: number;
}

export class SessionStats {
  private t0: number | null = null;
  private tLast = 0;
  private terminator = "\n";
  commits = 0;
  undos = 0;
  text = "";
  /** Symbols removed by undos, oldest first. */
  undone: string[] = [];

  /** Anchor the clock at the first hello; `text` seeds resumed sessions.
   *
   * A reconnect calls this again: the anchor is kept so elapsed time
   * spans the whole session, only the text snapshot is refreshed.
   */
  start(tMs: number, terminator: string, text: string): void {
    if (this.t0 === null) this.t0 = tMs;
    this.touch(tMs);
    this.terminator = terminator;
    this.text = text;
  }

  onCommit(tMs: number, text: string): void {
    this.commits += 1;
    this.text = text;
    this.touch(tMs);
  }

  onUndo(tMs: number, text: string): void {
    this.undos += 1;
    if (this.text.length > text.length) {
      this.undone.push(this.text.slice(text.length));
    }
    this.text = text;
    this.touch(tMs);
  }

  finish(tMs: number): void {
    this.touch(tMs);
  }

  private touch(tMs: number): void {
    if (this.t0 === null) this.t0 = tMs;
    if (tMs > this.tLast) this.tLast = tMs;
  }

  /** Entered characters, not counting the trailing terminator. */
  get chars(): number {
    const t = this.text;
    return t.endsWith(this.terminator) ? t.length - this.terminator.length : t.length;
  }

  summary(): StatsSummary {
    const seconds = this.t0 === null ? 0 : (this.tLast - this.t0) / 1000;
    const charsPerMin = seconds > 0 ? (this.chars / seconds) * 60 : 0;
    return {
      commits: this.commits,
      undos: this.undos,
      chars: this.chars,
      seconds,
      charsPerMin,
    };
  }
}
