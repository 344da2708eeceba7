package corpus.dataclass.clean;

public class CustomerRecord {
    private String name;
    private int birthYear;

    public CustomerRecord(String name, int birthYear) {
        this.name = name;
        this.birthYear = birthYear;
    }

    public String getName() {
        return name;
    }

    public int getBirthYear() {
        return birthYear;
    }

    // the description lives with the data it reads
    public String label(int year) {
        int age = year - birthYear;
        return name + " (" + age + ")";
    }
}

class CustomerPrinter {
    String describe(CustomerRecord record, int year) {
        return record.label(year);
    }
}
