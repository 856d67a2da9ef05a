/** Copy-task progress: compare the committed text against a fixed prompt. */

export type CharState = "ok" | "bad" | "todo";

export interface PromptChar {
  ch: string;
  state: CharState;
}

export class TrainingTask {
  private typed = "";
  private errors_ = 0;

  constructor(readonly prompt: string) {}

  /** Fold in a new authoritative text snapshot.
   *
   * Growth beyond the last snapshot is a commit; every freshly added
   * character that disagrees with the prompt counts as one error.
   * Shrinkage is an undo and never adds errors.
   */
  update(text: string, terminator = "\n"): void {
    const visible = text.endsWith(terminator)
      ? text.slice(0, text.length - terminator.length)
      : text;
    for (let i = this.typed.length; i < visible.length; i++) {
      if (visible[i] !== this.prompt[i]) this.errors_ += 1;
    }
    this.typed = visible;
  }

  get errors(): number {
    return this.errors_;
  }

  /** Length of the correct prefix typed so far. */
  get correct(): number {
    let n = 0;
    while (n < this.typed.length && this.typed[n] === this.prompt[n]) n++;
    return n;
  }

  get done(): boolean {
    return this.typed === this.prompt;
  }

  /** Per-character display states, prompt first, stray extras appended. */
  charStates(): PromptChar[] {
    const out: PromptChar[] = [];
    for (let i = 0; i < this.prompt.length; i++) {
      if (i >= this.typed.length) out.push({ ch: this.prompt[i], state: "todo" });
      else if (this.typed[i] === this.prompt[i]) out.push({ ch: this.prompt[i], state: "ok" });
      else out.push({ ch: this.typed[i], state: "bad" });
    }
    for (let i = this.prompt.length; i < this.typed.length; i++) {
      out.push({ ch: this.typed[i], state: "bad" });
    }
    return out;
  }
}
